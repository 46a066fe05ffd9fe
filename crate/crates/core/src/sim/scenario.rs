//! Labeled synthetic archives: organic trends, attacked trends, background
//! chatter, then per-tweet sampling.

use std::collections::{BTreeSet, HashSet};

use chrono::{Days, NaiveDate};
use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{trend_oracle, ActivityTweet, KeywordActivity, OracleParams};
use super::text::{gen_keyword_body, gen_lexicon_text, gen_sentence, Wordlist};
use super::SimError;
use crate::detect::AttackParams;
use crate::ingest::{TrendDay, TrendEpoch, Tweet, TweetEvent};
use crate::model::{normalize_keyword, Duration, Keyword, Locale, Timestamp, TzOffset};

const BOT_BASE: u64 = 1_000_000;
const ORGANIC_BASE: u64 = 100_000_000;
const ORGANIC_SPACE: u64 = 50_000_000;

/// Flat key-value scenario description. Durations are in seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub start_date: NaiveDate,
    pub n_days: u32,
    pub utc_offset_hours: i32,
    pub organic_per_day: u32,
    pub attacks_per_day: u32,
    /// Attacks on keywords that never trend.
    pub failed_attacks_per_day: u32,

    pub kappa: usize,
    pub alpha_p: Duration,
    pub alpha_d: Duration,
    pub theta: Duration,
    /// Bots per wave, uniform in `[bots_min, bots_max]` before sampling.
    pub bots_min: u32,
    pub bots_max: u32,
    pub failed_bots_min: u32,
    pub failed_bots_max: u32,
    pub waves_per_attack: u32,
    pub wave_gap_min: Duration,
    pub wave_gap_max: Duration,
    pub bot_pool: u32,
    pub missed_deletion_rate: f64,
    /// Organic users joining after an attack, as a fraction of its bots
    /// (uniform in `[0, adopters_max_ratio]`).
    pub adopters_max_ratio: f64,
    /// Start every wave on a trend-list snapshot boundary.
    pub epoch_aligned: bool,

    pub organic_users_min: u32,
    pub organic_users_max: u32,
    pub organic_span_min: Duration,
    pub organic_span_max: Duration,
    pub background_per_day: u32,
    pub background_deletion_rate: f64,
    /// Share of lexicon texts among organically deleted tweets.
    pub background_lexicon_rate: f64,
    pub retweet_rate: f64,
    pub reply_rate: f64,
    pub mention_rate: f64,
    pub url_rate: f64,
    pub extra_hashtag_rate: f64,

    pub sample_rate: f64,

    pub oracle_window: Duration,
    pub oracle_interval: Duration,
    pub oracle_list_len: usize,
    pub oracle_min_score: f64,
    pub penalty_weight: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        let oracle = OracleParams::default();
        Self {
            seed: 20190701,
            start_date: NaiveDate::from_ymd_opt(2019, 7, 1).expect("valid date"),
            n_days: 10,
            utc_offset_hours: 3,
            organic_per_day: 15,
            attacks_per_day: 5,
            failed_attacks_per_day: 0,
            kappa: 4,
            alpha_p: Duration::seconds(300),
            alpha_d: Duration::seconds(300),
            theta: Duration::seconds(600),
            bots_min: 100,
            bots_max: 600,
            failed_bots_min: 20,
            failed_bots_max: 80,
            waves_per_attack: 3,
            wave_gap_min: Duration::minutes(20),
            wave_gap_max: Duration::minutes(90),
            bot_pool: 5000,
            missed_deletion_rate: 0.02,
            adopters_max_ratio: 0.5,
            epoch_aligned: false,
            organic_users_min: 2000,
            organic_users_max: 8000,
            organic_span_min: Duration::hours(2),
            organic_span_max: Duration::hours(8),
            background_per_day: 5000,
            background_deletion_rate: 0.023,
            background_lexicon_rate: 0.023,
            retweet_rate: 0.35,
            reply_rate: 0.1,
            mention_rate: 0.15,
            url_rate: 0.15,
            extra_hashtag_rate: 0.1,
            sample_rate: 0.01,
            oracle_window: oracle.window,
            oracle_interval: oracle.interval,
            oracle_list_len: oracle.list_len,
            oracle_min_score: oracle.min_score,
            penalty_weight: oracle.penalty_weight,
        }
    }
}

impl ScenarioConfig {
    /// Single-wave attacks that start on a snapshot boundary and finish
    /// (created and deleted) before the next one, with no adopters.
    pub fn countermeasure() -> Self {
        Self {
            waves_per_attack: 1,
            alpha_p: Duration::seconds(60),
            alpha_d: Duration::seconds(200),
            epoch_aligned: true,
            adopters_max_ratio: 0.0,
            ..Self::default()
        }
    }

    pub fn attack_params(&self) -> AttackParams {
        AttackParams {
            kappa: self.kappa,
            alpha_p: self.alpha_p,
            alpha_d: self.alpha_d,
            theta: self.theta,
            require_lexicon: false,
        }
    }

    pub fn oracle_params(&self, mitigation: bool) -> OracleParams {
        OracleParams {
            window: self.oracle_window,
            interval: self.oracle_interval,
            list_len: self.oracle_list_len,
            min_score: self.oracle_min_score,
            mitigation,
            penalty_weight: self.penalty_weight,
        }
    }

    pub fn tz(&self) -> TzOffset {
        TzOffset::from_hours(self.utc_offset_hours).unwrap_or(TzOffset::UTC)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
        let rates = [
            ("missed_deletion_rate", self.missed_deletion_rate),
            ("adopters_max_ratio", self.adopters_max_ratio),
            ("background_deletion_rate", self.background_deletion_rate),
            ("background_lexicon_rate", self.background_lexicon_rate),
            ("retweet_rate", self.retweet_rate),
            ("reply_rate", self.reply_rate),
            ("mention_rate", self.mention_rate),
            ("url_rate", self.url_rate),
            ("extra_hashtag_rate", self.extra_hashtag_rate),
        ];
        for (name, r) in rates {
            if !(0.0..=1.0).contains(&r) {
                return bad(&format!("{name} must lie in [0, 1]"));
            }
        }
        if !(self.sample_rate > 0.0 && self.sample_rate <= 1.0) {
            return bad("sample_rate must lie in (0, 1]");
        }
        if self.n_days == 0 {
            return bad("n_days must be positive");
        }
        if TzOffset::from_hours(self.utc_offset_hours).is_none() {
            return bad("utc_offset_hours out of range");
        }
        if self.bots_min == 0 || self.bots_min > self.bots_max {
            return bad("need 1 <= bots_min <= bots_max");
        }
        if self.failed_attacks_per_day > 0 && (self.failed_bots_min == 0 || self.failed_bots_min > self.failed_bots_max) {
            return bad("need 1 <= failed_bots_min <= failed_bots_max");
        }
        if (self.bots_max.max(self.failed_bots_max)) > self.bot_pool {
            return bad("bot_pool smaller than the largest wave");
        }
        if self.waves_per_attack == 0 {
            return bad("waves_per_attack must be positive");
        }
        if self.wave_gap_min.is_negative() || self.wave_gap_min > self.wave_gap_max {
            return bad("need 0 <= wave_gap_min <= wave_gap_max");
        }
        if self.organic_users_min == 0 || self.organic_users_min > self.organic_users_max {
            return bad("need 1 <= organic_users_min <= organic_users_max");
        }
        if self.organic_span_min.as_secs() <= 0 || self.organic_span_min > self.organic_span_max {
            return bad("need 0 < organic_span_min <= organic_span_max");
        }
        if self.oracle_interval.as_secs() <= 0 || self.oracle_window.as_secs() <= 0 {
            return bad("oracle window and interval must be positive");
        }
        self.attack_params()
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))?;
        attack_deletion_width(&self.attack_params()).map(|_| ())
    }
}

/// Ground truth for one keyword-day.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct TruthRow {
    pub date: NaiveDate,
    pub keyword: Keyword,
    pub attacked: bool,
    pub trending: bool,
}

impl TruthRow {
    pub fn trend_day(&self) -> TrendDay {
        TrendDay::new(self.date, self.keyword.clone())
    }
}

/// A sampled archive with its labels and the full-scale keyword activity
/// behind it.
#[derive(Debug, Clone)]
pub struct LabeledStream {
    pub config: ScenarioConfig,
    /// Archive order: time, creations before deletions, tweet id.
    pub events: Vec<TweetEvent>,
    pub truth: Vec<TruthRow>,
    /// Every account that posted attack tweets.
    pub bots: BTreeSet<u64>,
    pub activity: Vec<KeywordActivity>,
}

impl LabeledStream {
    /// Trend days of the scenario, sorted.
    pub fn trend_days(&self) -> Vec<TrendDay> {
        let mut days: Vec<TrendDay> = self
            .truth
            .iter()
            .filter(|t| t.trending)
            .map(TruthRow::trend_day)
            .collect();
        days.sort();
        days
    }

    /// Snapshot boundaries covering the whole scenario.
    pub fn time_range(&self) -> (Timestamp, Timestamp) {
        let tz = self.config.tz();
        let first = self.config.start_date;
        let end = first
            .checked_add_days(Days::new(u64::from(self.config.n_days) + 1))
            .unwrap_or(first);
        (tz.midnight(first), tz.midnight(end))
    }

    pub fn epochs(&self, mitigation: bool) -> Vec<TrendEpoch> {
        let (start, end) = self.time_range();
        trend_oracle(&self.activity, &self.config.oracle_params(mitigation), start, end)
    }
}

/// Keeps each tweet with probability `rate`; a deletion notice survives
/// exactly when its tweet does. Notices for tweets absent from the input
/// are dropped.
pub fn sample_stream<R: Rng>(events: &[TweetEvent], rate: f64, rng: &mut R) -> Vec<TweetEvent> {
    let mut kept = HashSet::new();
    for ev in events {
        if let TweetEvent::Creation(t) = ev {
            if rate >= 1.0 || rng.gen_bool(rate) {
                kept.insert(t.id);
            }
        }
    }
    events
        .iter()
        .filter(|ev| kept.contains(&ev.tweet_id()))
        .cloned()
        .collect()
}

/// Width of the deletion interval that keeps every lifetime under θ.
fn attack_deletion_width(params: &AttackParams) -> Result<i64, SimError> {
    let ap = params.alpha_p.as_secs();
    let w = params.alpha_d.as_secs().min(params.theta.as_secs() - ap);
    if ap < 1 || w < 1 {
        return Err(SimError::InfeasibleParams);
    }
    Ok(w)
}

/// Sequential tweet ids.
#[derive(Debug, Clone, Default)]
pub struct IdSource(u64);

impl IdSource {
    pub fn starting_at(first: u64) -> Self {
        Self(first)
    }

    pub fn next_id(&mut self) -> u64 {
        self.0 += 1;
        self.0
    }
}

fn with_keyword<R: Rng>(text: &str, keyword: &Keyword, rng: &mut R) -> String {
    let mut tokens: Vec<&str> = text.split(' ').collect();
    let pos = rng.gen_range(0..=tokens.len());
    tokens.insert(pos, keyword.raw());
    tokens.join(" ")
}

fn hashtag_body(keyword: &Keyword) -> String {
    keyword.raw().trim_start_matches('#').to_string()
}

/// One attack wave: each bot posts one single-engagement lexicon tweet in
/// `[t0, t0 + α_p)` and deletes it in `[t0 + α_p, t0 + α_p + w)` with
/// `w = min(α_d, θ − α_p)`, so spans stay under α_p and α_d and lifetimes
/// under θ. Returns tweets with their deletion times.
pub fn gen_attack<R: Rng>(
    keyword: &Keyword,
    params: &AttackParams,
    bots: &[u64],
    t0: Timestamp,
    words: &Wordlist,
    ids: &mut IdSource,
    rng: &mut R,
) -> Result<Vec<(Tweet, Timestamp)>, SimError> {
    if bots.is_empty() {
        return Err(SimError::NoBots);
    }
    let w = attack_deletion_width(params)?;
    let ap = params.alpha_p.as_secs();
    let body = hashtag_body(keyword);
    let cluster: Vec<(Tweet, Timestamp)> = bots
        .iter()
        .map(|&user| {
            let created = t0 + Duration::seconds(rng.gen_range(0..ap));
            let deleted = t0 + Duration::seconds(ap + rng.gen_range(0..w));
            let text = with_keyword(&gen_lexicon_text(words, rng), keyword, rng);
            let mut t = Tweet::new(ids.next_id(), user, created, text);
            t.hashtags = vec![body.clone()];
            t.lang = Some("tr".into());
            (t, deleted)
        })
        .collect();
    check_cluster(&cluster, params);
    Ok(cluster)
}

fn check_cluster(cluster: &[(Tweet, Timestamp)], params: &AttackParams) {
    let ps = cluster.iter().map(|(t, _)| t.created_at.secs());
    let ds = cluster.iter().map(|(_, d)| d.secs());
    let span = |it: &mut dyn Iterator<Item = i64>| {
        let v: Vec<i64> = it.collect();
        v.iter().max().unwrap_or(&0) - v.iter().min().unwrap_or(&0)
    };
    let users: HashSet<u64> = cluster.iter().map(|(t, _)| t.user_id).collect();
    assert_eq!(users.len(), cluster.len(), "one tweet per bot");
    assert!(span(&mut ps.into_iter()) <= params.alpha_p.as_secs());
    assert!(span(&mut ds.into_iter()) <= params.alpha_d.as_secs());
    assert!(cluster
        .iter()
        .all(|(t, d)| *d >= t.created_at && *d - t.created_at <= params.theta));
}

/// Engagement mix and deletion behavior of ordinary accounts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrganicMix {
    pub retweet: f64,
    pub reply: f64,
    pub mention: f64,
    pub url: f64,
    pub extra_hashtag: f64,
    pub deletion: f64,
    pub lexicon_among_deletions: f64,
}

impl OrganicMix {
    pub fn from_config(c: &ScenarioConfig) -> Self {
        Self {
            retweet: c.retweet_rate,
            reply: c.reply_rate,
            mention: c.mention_rate,
            url: c.url_rate,
            extra_hashtag: c.extra_hashtag_rate,
            deletion: c.background_deletion_rate,
            lexicon_among_deletions: c.background_lexicon_rate,
        }
    }
}

fn organic_user<R: Rng>(rng: &mut R) -> u64 {
    ORGANIC_BASE + rng.gen_range(0..ORGANIC_SPACE)
}

/// An ordinary tweet at `created`, optionally carrying `keyword`.
pub fn gen_organic_tweet<R: Rng>(
    keyword: Option<&Keyword>,
    created: Timestamp,
    mix: &OrganicMix,
    words: &Wordlist,
    ids: &mut IdSource,
    rng: &mut R,
) -> (Tweet, Option<Timestamp>) {
    let deleted = rng
        .gen_bool(mix.deletion)
        .then(|| created + Duration::seconds(rng.gen_range(30..=2 * 86_400)));
    let mut t = Tweet::new(ids.next_id(), organic_user(rng), created, String::new());
    t.lang = Some("tr".into());
    let mut hashtags: Vec<String> = keyword.map(hashtag_body).into_iter().collect();
    if deleted.is_some() && rng.gen_bool(mix.lexicon_among_deletions) {
        let text = gen_lexicon_text(words, rng);
        t.text = match keyword {
            Some(k) => with_keyword(&text, k, rng),
            None => text,
        };
        t.hashtags = hashtags;
        return (t, deleted);
    }
    let mut parts: Vec<String> = Vec::new();
    if rng.gen_bool(mix.retweet) {
        let original = organic_user(rng);
        t.is_retweet = true;
        t.mentions.push(original);
        parts.push(format!("RT @u{original}:"));
    } else if rng.gen_bool(mix.reply) {
        let to = organic_user(rng);
        t.is_reply = true;
        t.mentions.push(to);
        parts.push(format!("@u{to}"));
    }
    parts.push(gen_sentence(words, rng));
    if let Some(k) = keyword {
        parts.push(k.raw().to_string());
    }
    if rng.gen_bool(mix.mention) {
        let m = organic_user(rng);
        t.mentions.push(m);
        parts.push(format!("@u{m}"));
    }
    if rng.gen_bool(mix.extra_hashtag) {
        let tag = format!("{}_{}", words.pick(rng), rng.gen_range(0..1000));
        parts.push(format!("#{tag}"));
        hashtags.push(tag);
    }
    if rng.gen_bool(mix.url) {
        let slug: String = (0..8).map(|_| rng.sample(rand::distributions::Alphanumeric) as char).collect();
        parts.push(format!("https://t.co/{slug}"));
        t.urls = 1;
    }
    t.text = parts.join(" ");
    t.hashtags = hashtags;
    (t, deleted)
}

/// `n_users` ordinary tweets on `keyword`, concentrated around the middle
/// of `[start, start + span)` (triangular density).
#[allow(clippy::too_many_arguments)]
pub fn gen_organic_trend<R: Rng>(
    keyword: &Keyword,
    n_users: u32,
    start: Timestamp,
    span: Duration,
    mix: &OrganicMix,
    words: &Wordlist,
    ids: &mut IdSource,
    rng: &mut R,
) -> Vec<(Tweet, Option<Timestamp>)> {
    let half = span.as_secs() as f64 / 2.0;
    (0..n_users)
        .map(|_| {
            let offset = half + (rng.gen::<f64>() + rng.gen::<f64>() - 1.0) * half;
            let created = start + Duration::seconds(offset.floor() as i64);
            gen_organic_tweet(Some(keyword), created, mix, words, ids, rng)
        })
        .collect()
}

struct Builder<'a> {
    cfg: &'a ScenarioConfig,
    words: &'a Wordlist,
    mix: OrganicMix,
    rng: ChaCha8Rng,
    ids: IdSource,
    used: HashSet<String>,
    events: Vec<TweetEvent>,
    activity: Vec<KeywordActivity>,
    bots: BTreeSet<u64>,
    truth: Vec<TruthRow>,
}

impl Builder<'_> {
    fn fresh_keyword(&mut self) -> Keyword {
        loop {
            let body = gen_keyword_body(self.words, &mut self.rng);
            let kw = normalize_keyword(&format!("#{body}"), Locale::Tr).expect("non-empty");
            if self.used.insert(kw.normalized().to_string()) {
                return kw;
            }
        }
    }

    /// Records full-scale activity, then samples the cluster into the archive.
    fn emit(&mut self, keyword: Option<usize>, cluster: Vec<(Tweet, Option<Timestamp>)>) {
        let mut events = Vec::with_capacity(cluster.len() * 2);
        for (t, d) in cluster {
            if let Some(k) = keyword {
                self.activity[k].tweets.push(ActivityTweet {
                    created: t.created_at,
                    user: t.user_id,
                    deleted: d,
                });
            }
            let (id, user) = (t.id, t.user_id);
            events.push(TweetEvent::Creation(t));
            if let Some(time) = d {
                events.push(TweetEvent::Deletion {
                    tweet_id: id,
                    user_id: user,
                    time,
                });
            }
        }
        let sampled = sample_stream(&events, self.cfg.sample_rate, &mut self.rng);
        self.events.extend(sampled);
    }

    fn track(&mut self, keyword: &Keyword) -> usize {
        self.activity.push(KeywordActivity {
            keyword: keyword.clone(),
            tweets: Vec::new(),
        });
        self.activity.len() - 1
    }

    fn align(&self, t: Timestamp) -> Timestamp {
        if !self.cfg.epoch_aligned {
            return t;
        }
        let step = self.cfg.oracle_interval.as_secs();
        Timestamp::from_secs((t.secs() + step - 1).div_euclid(step) * step)
    }

    fn organic(&mut self, date: NaiveDate, midnight: Timestamp) {
        let kw = self.fresh_keyword();
        let k = self.track(&kw);
        let n = self.rng.gen_range(self.cfg.organic_users_min..=self.cfg.organic_users_max);
        let span = Duration::seconds(
            self.rng
                .gen_range(self.cfg.organic_span_min.as_secs()..=self.cfg.organic_span_max.as_secs()),
        );
        let center = midnight + Duration::seconds(self.rng.gen_range(6 * 3600..20 * 3600));
        let start = center - Duration::seconds(span.as_secs() / 2);
        let cluster = gen_organic_trend(&kw, n, start, span, &self.mix, self.words, &mut self.ids, &mut self.rng);
        self.emit(Some(k), cluster);
        self.truth.push(TruthRow {
            date,
            keyword: kw,
            attacked: false,
            trending: true,
        });
    }

    fn attack(&mut self, date: NaiveDate, midnight: Timestamp, failed: bool) -> Result<(), SimError> {
        let kw = self.fresh_keyword();
        let k = self.track(&kw);
        let params = self.cfg.attack_params();
        let (lo, hi, waves) = if failed {
            (self.cfg.failed_bots_min, self.cfg.failed_bots_max, 1)
        } else {
            (self.cfg.bots_min, self.cfg.bots_max, self.cfg.waves_per_attack)
        };
        let first = midnight + Duration::seconds(self.rng.gen_range(3600..14 * 3600));
        let mut t0 = self.align(first);
        let mut total_bots = 0u64;
        let mut last_end = t0;
        for _ in 0..waves {
            let n = self.rng.gen_range(lo..=hi) as usize;
            let picks = sample(&mut self.rng, self.cfg.bot_pool as usize, n);
            let bots: Vec<u64> = picks.into_iter().map(|i| BOT_BASE + i as u64).collect();
            let cluster = gen_attack(&kw, &params, &bots, t0, self.words, &mut self.ids, &mut self.rng)?;
            self.bots.extend(bots.iter().copied());
            total_bots += n as u64;
            last_end = last_end.max(cluster.iter().map(|(_, d)| *d).max().unwrap_or(t0));
            let miss = self.cfg.missed_deletion_rate;
            let cluster: Vec<(Tweet, Option<Timestamp>)> = cluster
                .into_iter()
                .map(|(t, d)| {
                    let keep = !self.rng.gen_bool(miss);
                    (t, keep.then_some(d))
                })
                .collect();
            self.emit(Some(k), cluster);
            let gap = self
                .rng
                .gen_range(self.cfg.wave_gap_min.as_secs()..=self.cfg.wave_gap_max.as_secs());
            t0 = self.align(last_end + Duration::seconds(gap));
        }
        if !failed && self.cfg.adopters_max_ratio > 0.0 {
            let ratio = self.rng.gen_range(0.0..=self.cfg.adopters_max_ratio);
            let n = (ratio * total_bots as f64).round() as u32;
            let cluster: Vec<(Tweet, Option<Timestamp>)> = (0..n)
                .map(|_| {
                    let at = last_end + Duration::seconds(self.rng.gen_range(0..3 * 3600));
                    gen_organic_tweet(Some(&kw), at, &self.mix, self.words, &mut self.ids, &mut self.rng)
                })
                .collect();
            self.emit(Some(k), cluster);
        }
        self.truth.push(TruthRow {
            date,
            keyword: kw,
            attacked: true,
            trending: !failed,
        });
        Ok(())
    }

    fn background(&mut self, midnight: Timestamp) {
        let cluster: Vec<(Tweet, Option<Timestamp>)> = (0..self.cfg.background_per_day)
            .map(|_| {
                let at = midnight + Duration::seconds(self.rng.gen_range(0..86_400));
                gen_organic_tweet(None, at, &self.mix, self.words, &mut self.ids, &mut self.rng)
            })
            .collect();
        self.emit(None, cluster);
    }
}

/// Builds the labeled archive of a scenario. Identical configurations give
/// identical streams.
pub fn generate(cfg: &ScenarioConfig, words: &Wordlist) -> Result<LabeledStream, SimError> {
    cfg.validate()?;
    let tz = cfg.tz();
    let mut b = Builder {
        cfg,
        words,
        mix: OrganicMix::from_config(cfg),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        ids: IdSource::starting_at(1_000_000_000_000),
        used: HashSet::new(),
        events: Vec::new(),
        activity: Vec::new(),
        bots: BTreeSet::new(),
        truth: Vec::new(),
    };
    for day in 0..cfg.n_days {
        let date = cfg
            .start_date
            .checked_add_days(Days::new(u64::from(day)))
            .ok_or_else(|| SimError::InvalidConfig("date out of range".into()))?;
        let midnight = tz.midnight(date);
        for _ in 0..cfg.organic_per_day {
            b.organic(date, midnight);
        }
        for _ in 0..cfg.attacks_per_day {
            b.attack(date, midnight, false)?;
        }
        for _ in 0..cfg.failed_attacks_per_day {
            b.attack(date, midnight, true)?;
        }
        b.background(midnight);
    }
    let Builder {
        mut events,
        mut truth,
        bots,
        activity,
        ..
    } = b;
    events.sort_by_key(TweetEvent::order_key);
    truth.sort();
    Ok(LabeledStream {
        config: cfg.clone(),
        events,
        truth,
        bots,
        activity,
    })
}
