use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use trendguard::classify::StatsTable;
use trendguard::detect::{label_astrobots, AttackEvent};
use trendguard::features::write_features_csv;
use trendguard::graph::{
    build_graph, community_summary, k_core, louvain, single_attack_filter, user_overlap, write_edges_csv,
    write_partition_csv, EdgePredicate, Graph, GraphError, LouvainOptions, NodeKind, Partition,
};
use trendguard::ingest::{load_trend_days, load_trend_epochs, write_events, write_trend_days, write_trend_epochs};
use trendguard::metrics::{
    entry_hour_histogram, lifecycle, mean_prevalence, pre_entry_deletion_ratio, prevalence, trend_speed,
    volume_report, write_histogram_csv, write_lifecycles_csv, write_prevalence_csv, write_volume_csv, EPOCH_INTERVAL,
};
use trendguard::pipeline::{hashtag_day_verdicts, HashtagDays, TrendIndex};
use trendguard::sim::{generate, load_truth_csv, write_bots, write_truth_csv, EvalReport, ScenarioConfig, Wordlist};
use trendguard::{
    classify_trend, count_features, detect_attack_windows, AttackParams, ContentClassifier, DetectorConfig, Duration,
    Locale, Timestamp, TrendDay, TrendEpoch, TweetRecord, TzOffset, Verdict,
};

use crate::archive::collect;
use crate::args::*;
use crate::output::{emit, Staged};
use crate::{usage, Result};

const DEFAULT_TZ: TzOffset = TzOffset::TURKEY;

struct Ctx {
    locale: Locale,
    tz: Option<TzOffset>,
    classifier: ContentClassifier,
}

impl Ctx {
    fn tz(&self) -> TzOffset {
        self.tz.unwrap_or(DEFAULT_TZ)
    }
}

pub fn run(cli: Cli) -> Result<()> {
    check_inputs(&cli.command)?;
    let ctx = Ctx {
        locale: cli.global.locale,
        tz: cli.global.tz,
        classifier: ContentClassifier::new(cli.global.locale),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.global.jobs {
        if n == 0 {
            return usage("--jobs must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;
    pool.install(|| match &cli.command {
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Features(a) => features(&ctx, a),
        Command::Detect(a) => detect(&ctx, a),
        Command::Scan(a) => scan(&ctx, a),
        Command::Metrics(a) => metrics(&ctx, a),
        Command::Graph(a) => graph(&ctx, a),
        Command::Simulate(a) => simulate(a),
        Command::Evaluate(a) => evaluate(&ctx, a),
    })
}

/// Every input path must exist before any work starts.
fn check_inputs(cmd: &Command) -> Result<()> {
    let mut paths: Vec<&Path> = Vec::new();
    match cmd {
        Command::Ingest(a) => {
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
            paths.extend(a.trends.as_deref());
        }
        Command::Features(a) => {
            paths.push(&a.trends.trends);
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
        }
        Command::Detect(a) => {
            paths.push(&a.trends.trends);
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
        }
        Command::Scan(a) => {
            paths.push(&a.trends.trends);
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
        }
        Command::Metrics(a) => {
            paths.push(&a.trends.trends);
            paths.push(&a.epochs);
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
        }
        Command::Graph(a) => {
            paths.push(&a.trends.trends);
            paths.extend(a.stream.streams.iter().map(PathBuf::as_path));
        }
        Command::Simulate(a) => {
            paths.extend(a.config.as_deref());
            paths.extend(a.wordlist.as_deref());
        }
        Command::Evaluate(a) => {
            for name in ["stream.jsonl", "truth.csv", "scenario.toml"] {
                if !a.sim.join(name).is_file() {
                    return usage(format!("{}: not a simulation directory (missing {name})", a.sim.display()));
                }
            }
        }
    }
    for p in paths {
        if !p.is_file() {
            return usage(format!("{}: no such file", p.display()));
        }
    }
    Ok(())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(File::open(path).map_err(|e| format!("{}: {e}", path.display()))?))
}

fn load_trends(path: &Path, locale: Locale) -> Result<Vec<TrendDay>> {
    Ok(load_trend_days(open(path)?, locale).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn load_epochs(path: &Path, locale: Locale) -> Result<Vec<TrendEpoch>> {
    Ok(load_trend_epochs(open(path)?, locale).map_err(|e| format!("{}: {e}", path.display()))?)
}

fn detector(a: &DetectorArgs) -> Result<DetectorConfig> {
    let thresholds: BTreeMap<u64, f64> = a.thresholds.iter().copied().collect();
    DetectorConfig::build(a.preset, a.formula.as_deref(), &thresholds).or_else(|e| usage(e.to_string()))
}

fn attack_params(a: &WindowArgs) -> Result<AttackParams> {
    let p = AttackParams {
        kappa: a.kappa,
        alpha_p: Duration::seconds(a.alpha_p),
        alpha_d: Duration::seconds(a.alpha_d),
        theta: Duration::seconds(a.theta),
        require_lexicon: a.require_lexicon,
    };
    p.validate().or_else(|e| usage(e.to_string()))?;
    Ok(p)
}

fn out_path(o: &OutArgs) -> Option<&Path> {
    if o.stdout {
        None
    } else {
        o.out.as_deref()
    }
}

/// Trend days (sorted, deduplicated) with their records, in the same order.
struct TrendData {
    days: Vec<TrendDay>,
    groups: Vec<trendguard::pipeline::Group>,
    stats: trendguard::ingest::ParseStats,
    background: Option<trendguard::classify::LexiconColumn>,
}

fn trend_data(ctx: &Ctx, days: Vec<TrendDay>, streams: &[PathBuf], with_background: bool) -> Result<TrendData> {
    let index = TrendIndex::new(days, ctx.locale, ctx.tz());
    let mut c = collect(streams, &index, &ctx.classifier, with_background)?;
    let days = index.trends().to_vec();
    let groups = (0..days.len() as u32)
        .map(|i| c.groups.remove(&i).unwrap_or_default())
        .collect();
    Ok(TrendData {
        days,
        groups,
        stats: c.stats,
        background: c.background,
    })
}

fn verdicts(data: &TrendData, config: &DetectorConfig) -> Vec<Verdict> {
    data.days
        .par_iter()
        .zip(&data.groups)
        .map(|(d, g)| classify_trend(d, &count_features(&g.records), config))
        .collect()
}

fn write_jsonl<T: Serialize>(w: &mut dyn Write, rows: impl IntoIterator<Item = T>) -> Result<()> {
    for r in rows {
        serde_json::to_writer(&mut *w, &r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

fn write_json<T: Serialize>(w: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

// ---------------------------------------------------------------------------

fn ingest(ctx: &Ctx, a: &IngestArgs) -> Result<()> {
    let days = match &a.trends {
        Some(p) => load_trends(p, ctx.locale)?,
        None => Vec::new(),
    };
    let data = trend_data(ctx, days, &a.stream.streams, a.stats.is_some())?;
    let per_trend: Vec<_> = data
        .days
        .iter()
        .zip(&data.groups)
        .map(|(d, g)| {
            json!({
                "date": d.date,
                "keyword": d.keyword.canonical(),
                "tweets": g.records.len(),
                "deleted": g.records.iter().filter(|r| r.is_deleted()).count(),
                "rejected_deletions": g.rejected_deletions,
            })
        })
        .collect();
    let report = json!({
        "files": a.stream.streams.len(),
        "stats": data.stats,
        "reconciles": data.stats.reconciles(),
        "trends": per_trend,
    });
    let mut staged = Staged::new();
    if let Some(path) = &a.stats {
        let table = StatsTable {
            trends: trendguard::pipeline::grouped_column(&data.groups.iter().cloned().enumerate().collect()),
            other: data.background.unwrap_or_default(),
        };
        if table.trends.all == 0 && table.other.all == 0 {
            return Err("no tweets to summarize".into());
        }
        staged.write(path, |w| Ok(table.write_csv(w)?))?;
    }
    emit(&mut staged, out_path(&a.out), |w| write_json(w, &report))?;
    staged.commit()
}

fn features(ctx: &Ctx, a: &FeaturesArgs) -> Result<()> {
    let days = load_trends(&a.trends.trends, ctx.locale)?;
    let data = trend_data(ctx, days, &a.stream.streams, false)?;
    let rows: Vec<_> = data
        .days
        .par_iter()
        .zip(&data.groups)
        .map(|(d, g)| (d.clone(), count_features(&g.records)))
        .collect();
    let mut staged = Staged::new();
    emit(&mut staged, out_path(&a.out), |w| Ok(write_features_csv(w, &rows)?))?;
    staged.commit()
}

#[derive(Serialize)]
struct AttackRow<'a> {
    date: NaiveDate,
    keyword: &'a str,
    size: usize,
    start: String,
    end: String,
    creation_window_s: i64,
    deletion_window_s: i64,
    max_lifetime_s: i64,
    users: &'a [u64],
    tweet_ids: &'a [u64],
}

fn attack_row<'a>(v: &'a Verdict, e: &'a AttackEvent) -> AttackRow<'a> {
    AttackRow {
        date: v.date,
        keyword: &v.keyword,
        size: e.size(),
        start: e.start.to_iso(),
        end: e.end.to_iso(),
        creation_window_s: e.creation_window.as_secs(),
        deletion_window_s: e.deletion_window.as_secs(),
        max_lifetime_s: e.max_lifetime.as_secs(),
        users: &e.users,
        tweet_ids: &e.tweet_ids,
    }
}

fn detect(ctx: &Ctx, a: &DetectArgs) -> Result<()> {
    let config = detector(&a.detector)?;
    let params = attack_params(&a.windows)?;
    let days = load_trends(&a.trends.trends, ctx.locale)?;
    let data = trend_data(ctx, days, &a.stream.streams, false)?;
    let verdicts = verdicts(&data, &config);
    let mut staged = Staged::new();
    if let Some(path) = &a.bots {
        let pairs = verdicts.iter().zip(data.groups.iter().map(|g| g.records.as_slice()));
        let bots = label_astrobots(pairs, ctx.tz());
        staged.write(path, |w| Ok(write_bots(w, &bots)?))?;
    }
    if let Some(path) = &a.attacks {
        let events: Vec<Vec<AttackEvent>> = verdicts
            .par_iter()
            .zip(&data.groups)
            .map(|(v, g)| {
                if v.attacked {
                    detect_attack_windows(&g.records, &params)
                } else {
                    Vec::new()
                }
            })
            .collect();
        staged.write(path, |w| {
            let rows = verdicts
                .iter()
                .zip(&events)
                .flat_map(|(v, es)| es.iter().map(move |e| attack_row(v, e)));
            write_jsonl(w, rows)
        })?;
    }
    emit(&mut staged, out_path(&a.out), |w| write_jsonl(w, &verdicts))?;
    staged.commit()
}

fn scan(ctx: &Ctx, a: &ScanArgs) -> Result<()> {
    let config = detector(&a.detector)?;
    let known: HashSet<TrendDay> = load_trends(&a.trends.trends, ctx.locale)?.into_iter().collect();
    let grouper = HashtagDays {
        locale: ctx.locale,
        tz: ctx.tz(),
    };
    let c = collect(&a.stream.streams, &grouper, &ctx.classifier, false)?;
    let verdicts = hashtag_day_verdicts(&c.groups, &known, &config, ctx.locale, a.min_tweets);
    let mut staged = Staged::new();
    emit(&mut staged, out_path(&a.out), |w| write_jsonl(w, verdicts.iter().map(|(_, v)| v)))?;
    staged.commit()
}

#[derive(Serialize)]
struct SpeedRow {
    date: NaiveDate,
    keyword: String,
    attacked: bool,
    first_entry: Option<String>,
    initial_rank: Option<u32>,
    best_rank: Option<u32>,
    minutes_on_list: Option<f64>,
    speed_s: Option<i64>,
    pre_entry_deletion_ratio: Option<f64>,
}

fn write_csv_rows<T: Serialize>(w: &mut dyn Write, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

fn metrics(ctx: &Ctx, a: &MetricsArgs) -> Result<()> {
    let config = detector(&a.detector)?;
    let tz = ctx.tz();
    let mut epochs = load_epochs(&a.epochs, ctx.locale)?;
    epochs.sort_by_key(|e| e.captured_at);
    let days = load_trends(&a.trends.trends, ctx.locale)?;
    let data = trend_data(ctx, days, &a.stream.streams, false)?;
    let verdicts = verdicts(&data, &config);

    let mut by_date: BTreeMap<NaiveDate, Vec<TrendEpoch>> = BTreeMap::new();
    for e in &epochs {
        by_date.entry(e.captured_at.local_date(tz)).or_default().push(e.clone());
    }
    let none: Vec<TrendEpoch> = Vec::new();
    let lives: Vec<_> = data
        .days
        .par_iter()
        .map(|d| lifecycle(&d.keyword, by_date.get(&d.date).unwrap_or(&none), EPOCH_INTERVAL).ok())
        .collect();

    let mut speed = Vec::new();
    let (mut hours_attacked, mut hours_other) = (Vec::new(), Vec::new());
    for ((d, g), (v, life)) in data.days.iter().zip(&data.groups).zip(verdicts.iter().zip(&lives)) {
        if let Some(l) = life {
            if v.attacked {
                hours_attacked.push(l.clone());
            } else {
                hours_other.push(l.clone());
            }
        }
        speed.push(SpeedRow {
            date: d.date,
            keyword: d.keyword.canonical(),
            attacked: v.attacked,
            first_entry: life.as_ref().map(|l| l.first_entry.to_iso()),
            initial_rank: life.as_ref().map(|l| l.initial_rank),
            best_rank: life.as_ref().map(|l| l.best_rank),
            minutes_on_list: life.as_ref().map(|l| l.time_on_list().as_secs() as f64 / 60.0),
            speed_s: life
                .as_ref()
                .and_then(|l| trend_speed(&g.records, l).ok())
                .map(Duration::as_secs),
            pre_entry_deletion_ratio: life.as_ref().map(|l| pre_entry_deletion_ratio(&g.records, l)),
        });
    }
    let all_lives: Vec<_> = lives.iter().flatten().cloned().collect();
    let prev = prevalence(&verdicts, &epochs, a.top_k, tz);
    let volume_input: Vec<(TrendDay, bool, u64)> = data
        .days
        .iter()
        .zip(&data.groups)
        .zip(&verdicts)
        .map(|((d, g), v)| (d.clone(), v.attacked, g.records.iter().filter(|r| !r.is_deleted()).count() as u64))
        .collect();
    let volumes = volume_report(&volume_input, &epochs, tz);
    let summary = json!({
        "trend_days": data.days.len(),
        "attacked": verdicts.iter().filter(|v| v.attacked).count(),
        "never_trended": lives.iter().filter(|l| l.is_none()).count(),
        "top_k": a.top_k,
        "mean_prevalence": mean_prevalence(&prev),
    });

    let dir = &a.out_dir;
    let mut staged = Staged::new();
    staged.write(&dir.join("lifecycles.csv"), |w| Ok(write_lifecycles_csv(w, &all_lives)?))?;
    staged.write(&dir.join("speed.csv"), |w| write_csv_rows(w, &speed))?;
    staged.write(&dir.join("entry_hours_attacked.csv"), |w| {
        Ok(write_histogram_csv(w, &entry_hour_histogram(&hours_attacked, tz))?)
    })?;
    staged.write(&dir.join("entry_hours_other.csv"), |w| {
        Ok(write_histogram_csv(w, &entry_hour_histogram(&hours_other, tz))?)
    })?;
    staged.write(&dir.join("prevalence.csv"), |w| Ok(write_prevalence_csv(w, &prev)?))?;
    staged.write(&dir.join("volume.csv"), |w| Ok(write_volume_csv(w, &volumes)?))?;
    staged.write(&dir.join("summary.json"), |w| write_json(w, &summary))?;
    staged.commit()
}

fn partition(g: &Graph, opts: &LouvainOptions) -> Result<Option<Partition>> {
    match louvain(g, opts) {
        Ok(p) => Ok(Some(p)),
        Err(GraphError::EmptyGraph) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn network_summary(g: &Graph, p: &Option<Partition>) -> serde_json::Value {
    json!({
        "users": g.count_kind(NodeKind::User),
        "trends": g.count_kind(NodeKind::Trend),
        "edges": g.edge_count(),
        "communities": p.as_ref().map(|p| p.n_communities),
        "modularity": p.as_ref().map(|p| p.modularity),
    })
}

fn graph(ctx: &Ctx, a: &GraphArgs) -> Result<()> {
    if a.k == 0 {
        return usage("--k must be at least 1");
    }
    let config = detector(&a.detector)?;
    let days = load_trends(&a.trends.trends, ctx.locale)?;
    let data = trend_data(ctx, days, &a.stream.streams, false)?;
    let verdicts = verdicts(&data, &config);
    let attacked: Vec<(&TrendDay, &[TweetRecord])> = data
        .days
        .iter()
        .zip(&data.groups)
        .zip(&verdicts)
        .filter(|(_, v)| v.attacked)
        .map(|((d, g), _)| (d, g.records.as_slice()))
        .collect();

    let (interest, astro) = rayon::join(
        || k_core(&build_graph(attacked.iter().copied(), EdgePredicate::Undeleted), a.k),
        || single_attack_filter(&build_graph(attacked.iter().copied(), EdgePredicate::DeletedLexicon)),
    );
    let opts = LouvainOptions {
        seed: a.seed,
        weighted: !a.unweighted,
    };
    let (pi, pa) = rayon::join(|| partition(&interest, &opts), || partition(&astro, &opts));
    let (pi, pa) = (pi?, pa?);

    let mut attack_times: HashMap<u64, Vec<Timestamp>> = HashMap::new();
    for (_, records) in &attacked {
        for r in records.iter().filter(|r| EdgePredicate::DeletedLexicon.admits(r)) {
            attack_times.entry(r.user).or_default().push(r.created);
        }
    }
    let mut last_kept: HashMap<u64, Timestamp> = HashMap::new();
    for r in data.groups.iter().flat_map(|g| &g.records).filter(|r| !r.is_deleted()) {
        let e = last_kept.entry(r.user).or_insert(r.created);
        *e = (*e).max(r.created);
    }
    let communities = pa.as_ref().map(|p| {
        community_summary(&astro, p, &attack_times, &last_kept, Duration::days(a.dormancy_days))
    });

    let summary = json!({
        "attacked_trends": attacked.len(),
        "interest": network_summary(&interest, &pi),
        "astrobot": network_summary(&astro, &pa),
        "user_overlap": user_overlap(&interest, &astro),
        "dormant_users": communities.as_ref().map(|cs| cs.iter().map(|c| c.dormant()).sum::<usize>()),
    });

    let dir = &a.out_dir;
    let mut staged = Staged::new();
    for (name, g, p) in [("interest", &interest, &pi), ("astrobot", &astro, &pa)] {
        staged.write(&dir.join(format!("{name}_edges.csv")), |w| Ok(write_edges_csv(w, g)?))?;
        if let Some(p) = p {
            staged.write(&dir.join(format!("{name}_partition.csv")), |w| Ok(write_partition_csv(w, g, p)?))?;
        }
    }
    if let Some(cs) = &communities {
        let rows: Vec<_> = cs
            .iter()
            .map(|c| {
                json!({
                    "community": c.community,
                    "users": c.n_users,
                    "trends": c.n_trends,
                    "first_seen": c.first_seen.map(Timestamp::to_iso),
                    "last_seen": c.last_seen.map(Timestamp::to_iso),
                    "dormant": c.dormant(),
                    "dormancy_gaps": c.dormancy_gaps.iter().map(|g| json!({
                        "user": g.user,
                        "gap_days": g.gap.as_secs() as f64 / 86_400.0,
                        "flagged": g.flagged,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        staged.write(&dir.join("communities.json"), |w| write_json(w, &rows))?;
    }
    staged.write(&dir.join("summary.json"), |w| write_json(w, &summary))?;
    staged.commit()
}

/// Layers the file's keys over the preset so unspecified keys keep the
/// preset's values.
fn scenario_config(a: &SimulateArgs) -> Result<ScenarioConfig> {
    let base = match a.scenario {
        ScenarioPreset::Default => ScenarioConfig::default(),
        ScenarioPreset::Countermeasure => ScenarioConfig::countermeasure(),
    };
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let overrides: toml::Table = text.parse().or_else(|e| usage(format!("{}: {e}", path.display())))?;
            let mut table = toml::Table::try_from(&base)?;
            table.extend(overrides);
            toml::Value::Table(table)
                .try_into()
                .or_else(|e: toml::de::Error| usage(format!("{}: {e}", path.display())))?
        }
        None => base,
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    cfg.validate().or_else(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn simulate(a: &SimulateArgs) -> Result<()> {
    let cfg = scenario_config(a)?;
    let words = match &a.wordlist {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Wordlist::parse(&text).or_else(|e| usage(format!("{}: {e}", p.display())))?
        }
        None => Wordlist::bundled(),
    };
    let stream = generate(&cfg, &words)?;
    let dir = &a.out;
    let mut staged = Staged::new();
    staged.write(&dir.join("stream.jsonl"), |w| Ok(write_events(w, &stream.events)?))?;
    staged.write(&dir.join("truth.csv"), |w| Ok(write_truth_csv(w, &stream.truth)?))?;
    staged.write(&dir.join("trends.csv"), |w| Ok(write_trend_days(w, &stream.trend_days())?))?;
    let (plain, mitigated) = rayon::join(|| stream.epochs(false), || stream.epochs(true));
    staged.write(&dir.join("epochs.csv"), |w| Ok(write_trend_epochs(w, &plain)?))?;
    staged.write(&dir.join("epochs_mitigated.csv"), |w| Ok(write_trend_epochs(w, &mitigated)?))?;
    staged.write(&dir.join("bots.txt"), |w| Ok(write_bots(w, &stream.bots)?))?;
    staged.write(&dir.join("scenario.toml"), |w| Ok(w.write_all(toml::to_string(&cfg)?.as_bytes())?))?;
    staged.commit()?;
    eprintln!(
        "trendguard: wrote {} events, {} trend days to {}",
        stream.events.len(),
        stream.trend_days().len(),
        dir.display()
    );
    Ok(())
}

fn evaluate(ctx: &Ctx, a: &EvaluateArgs) -> Result<()> {
    let config = detector(&a.detector)?;
    let scenario_path = a.sim.join("scenario.toml");
    let text = fs::read_to_string(&scenario_path)?;
    let scenario: ScenarioConfig = toml::from_str(&text).map_err(|e| format!("{}: {e}", scenario_path.display()))?;
    let ctx = Ctx {
        locale: ctx.locale,
        tz: Some(ctx.tz.unwrap_or(scenario.tz())),
        classifier: ctx.classifier.clone(),
    };
    let truth_path = a.sim.join("truth.csv");
    let truth = load_truth_csv(open(&truth_path)?, ctx.locale).map_err(|e| format!("{}: {e}", truth_path.display()))?;
    let labels: HashMap<TrendDay, bool> = truth
        .iter()
        .filter(|r| r.trending)
        .map(|r| (r.trend_day(), r.attacked))
        .collect();
    let days: Vec<TrendDay> = labels.keys().cloned().collect();
    let data = trend_data(&ctx, days, &[a.sim.join("stream.jsonl")], false)?;
    let verdicts = verdicts(&data, &config);
    let report = EvalReport::from_pairs(data.days.iter().zip(&verdicts).map(|(d, v)| (v.attacked, labels[d])));
    let mut staged = Staged::new();
    if let Some(path) = &a.verdicts {
        staged.write(path, |w| write_jsonl(w, &verdicts))?;
    }
    emit(&mut staged, a.out.as_deref(), |w| write_json(w, &report))?;
    staged.commit()
}
