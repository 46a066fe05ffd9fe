use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use trendguard::detect::Preset;
use trendguard::{Locale, TzOffset};

#[derive(Debug, Parser)]
#[command(
    name = "trendguard",
    version,
    about = "Detect and analyze ephemeral astroturfing attacks on trending-topic lists"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Case-folding locale: `tr` (dotted and dotless i) or `root`.
    #[arg(long, global = true, env = "TRENDGUARD_LOCALE", default_value = "tr")]
    pub locale: Locale,
    /// Reporting timezone as a UTC offset, e.g. `+03:00` [default: +03:00;
    /// `evaluate` defaults to the scenario's offset].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tz: Option<TzOffset>,
    /// Worker threads [default: available parallelism]. Outputs do not depend on it.
    #[arg(long, short = 'j', global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse archives and report record counts, optionally per trend day.
    Ingest(IngestArgs),
    /// Write the per-trend feature table.
    Features(FeaturesArgs),
    /// Classify trend days and write one verdict per line.
    Detect(DetectArgs),
    /// Look for attacked hashtags that never trended.
    Scan(ScanArgs),
    /// Trend lifecycles, speed, prevalence, entry hours and volumes.
    Metrics(MetricsArgs),
    /// Build, filter and partition the user-trend networks.
    Graph(GraphArgs),
    /// Generate a labeled synthetic archive.
    Simulate(SimulateArgs),
    /// Score a detector against a simulated archive.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct StreamArgs {
    /// Archive files (JSON lines, optionally gzip or bzip2 compressed).
    #[arg(long = "stream", required = true, num_args = 1..)]
    pub streams: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    /// Trend-day CSV with header `date,keyword`.
    #[arg(long)]
    pub trends: PathBuf,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file, replaced atomically on success.
    #[arg(long, required_unless_present = "stdout")]
    pub out: Option<PathBuf>,
    /// Write the output to standard output instead.
    #[arg(long, conflicts_with = "out")]
    pub stdout: bool,
}

#[derive(Debug, Args)]
pub struct DetectorArgs {
    /// Rule preset.
    #[arg(long, default_value = "lexicon-tree", value_parser = parse_preset)]
    pub preset: Preset,
    /// Rule formula such as `r8>=4 & r9>0.45 | r5>=10 & r6>=0.5`; a bare `rN`
    /// uses the rule's default threshold. Required with `--preset custom`.
    #[arg(long)]
    pub formula: Option<String>,
    /// Threshold override `rN=VALUE`, applied to every condition on rule N.
    #[arg(long = "threshold", value_name = "rN=VALUE", value_parser = parse_threshold)]
    pub thresholds: Vec<(u64, f64)>,
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse()
}

fn parse_threshold(s: &str) -> Result<(u64, f64), String> {
    let (rule, value) = s.split_once('=').ok_or("expected rN=VALUE")?;
    let rule = rule
        .trim()
        .trim_start_matches(['r', 'R'])
        .parse::<u64>()
        .map_err(|_| format!("bad rule in `{s}`"))?;
    let value = value.trim().parse::<f64>().map_err(|_| format!("bad value in `{s}`"))?;
    Ok((rule, value))
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Minimum attack size.
    #[arg(long, default_value_t = 4)]
    pub kappa: usize,
    /// Creation window, seconds.
    #[arg(long, default_value_t = 300)]
    pub alpha_p: i64,
    /// Deletion window, seconds.
    #[arg(long, default_value_t = 300)]
    pub alpha_d: i64,
    /// Maximum lifetime, seconds.
    #[arg(long, default_value_t = 600)]
    pub theta: i64,
    /// Only lexicon tweets count toward an attack.
    #[arg(long)]
    pub require_lexicon: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub stream: StreamArgs,
    /// Trend days to summarize individually.
    #[arg(long)]
    pub trends: Option<PathBuf>,
    /// Also write the lexicon table (trend tweets against the rest) here.
    #[arg(long, requires = "trends")]
    pub stats: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    #[command(flatten)]
    pub trends: TrendArgs,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub trends: TrendArgs,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    #[command(flatten)]
    pub windows: WindowArgs,
    #[command(flatten)]
    pub out: OutArgs,
    /// Write the astrobot user ids here, one per line.
    #[arg(long)]
    pub bots: Option<PathBuf>,
    /// Write the attack windows of attacked trends here (JSON lines).
    #[arg(long = "attacks")]
    pub attacks: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Trend days known to have trended.
    #[command(flatten)]
    pub trends: TrendArgs,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Skip hashtag days with fewer tweets.
    #[arg(long, default_value_t = 4)]
    pub min_tweets: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[command(flatten)]
    pub trends: TrendArgs,
    /// Trend-list snapshots, CSV `captured_at,location,rank,keyword,volume`.
    #[arg(long)]
    pub epochs: PathBuf,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Prevalence counts entrants reaching this rank.
    #[arg(long, default_value_t = 10)]
    pub top_k: u32,
    /// Output directory.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub trends: TrendArgs,
    #[command(flatten)]
    pub stream: StreamArgs,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Core order for the interest-group network.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Seed for the Louvain visiting order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Ignore edge weights in modularity.
    #[arg(long)]
    pub unweighted: bool,
    /// Dormancy threshold, days.
    #[arg(long, default_value_t = 365)]
    pub dormancy_days: i64,
    /// Output directory.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScenarioPreset {
    /// 150 organic and 50 attacked trend days at 1% sampling.
    Default,
    /// Snapshot-aligned single-wave attacks without adopters.
    Countermeasure,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario file (flat TOML); unspecified keys take the preset's values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base scenario.
    #[arg(long, value_enum, default_value = "default")]
    pub scenario: ScenarioPreset,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Lexicon wordlist, one lowercase word per line [default: bundled list].
    #[arg(long)]
    pub wordlist: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Directory written by `simulate`.
    #[arg(long)]
    pub sim: PathBuf,
    #[command(flatten)]
    pub detector: DetectorArgs,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the verdicts (JSON lines).
    #[arg(long)]
    pub verdicts: Option<PathBuf>,
}
