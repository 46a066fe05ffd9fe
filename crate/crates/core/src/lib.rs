//! Detection and analysis of ephemeral astroturfing: coordinated bursts of
//! tweets that push a keyword onto a trending list and are deleted minutes
//! later.
//!
//! The pipeline runs archive parsing ([`ingest`]), per-tweet content flags
//! ([`classify`]), per-trend features ([`features`]), rule-based verdicts and
//! attack-window search ([`detect`]), success metrics ([`metrics`]) and
//! user-trend graph analysis ([`graph`]). [`sim`] generates labeled archives
//! for evaluation and [`pipeline`] streams archives too large for memory.

pub mod classify;
pub mod detect;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod sim;

pub use classify::ContentClassifier;
pub use detect::{classify_trend, detect_attack_windows, AttackEvent, AttackParams, DetectorConfig, Preset, Verdict};
pub use features::{count_features, FeatureVector, TweetRecord};
pub use ingest::{Corpus, TrendDay, TrendEpoch, TrendInstance, Tweet, TweetEvent};
pub use model::{normalize_keyword, Duration, Keyword, Locale, Timestamp, TzOffset};
