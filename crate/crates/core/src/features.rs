//! Per-trend behavioral features consumed by the detectors.

use std::collections::HashMap;
use std::io::Write;

use serde::Serialize;

use crate::classify::{ContentClassifier, TweetFlags};
use crate::ingest::{TrendDay, TrendInstance};
use crate::model::{Duration, Timestamp};

/// The per-tweet facts the feature extractor needs. Small enough to keep
/// millions in memory when streaming.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TweetRecord {
    pub id: u64,
    pub user: u64,
    pub created: Timestamp,
    pub deleted_at: Option<Timestamp>,
    pub is_retweet: bool,
    pub is_lexicon: bool,
    pub is_single_engagement: bool,
}

impl TweetRecord {
    pub fn is_deleted(&self) -> bool {
        self.deleted_at.is_some()
    }

    /// Deletion time minus creation time, for deleted tweets.
    pub fn lifetime(&self) -> Option<Duration> {
        self.deleted_at.map(|d| d - self.created)
    }

    pub fn set_flags(&mut self, flags: TweetFlags) {
        self.is_lexicon = flags.is_lexicon;
        self.is_single_engagement = flags.is_single_engagement;
    }
}

/// Records of an instance, in its `(created_at, id)` order.
pub fn instance_records(instance: &TrendInstance, flags: &[TweetFlags]) -> Vec<TweetRecord> {
    assert_eq!(instance.tweets.len(), flags.len(), "one flag set per tweet");
    instance
        .tweets
        .iter()
        .zip(flags)
        .map(|(t, f)| TweetRecord {
            id: t.id,
            user: t.user_id,
            created: t.created_at,
            deleted_at: instance.deletion_of(t.id),
            is_retweet: t.is_retweet,
            is_lexicon: f.is_lexicon,
            is_single_engagement: f.is_single_engagement,
        })
        .collect()
}

/// Classifies every tweet of `instance` and returns its records.
pub fn classify_instance(classifier: &ContentClassifier, instance: &TrendInstance) -> Vec<TweetRecord> {
    instance_records(instance, &classifier.instance_flags(instance))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct FeatureVector {
    pub n_tweets: u64,
    pub n_deleted: u64,
    pub n_nonretweet: u64,
    pub n_deleted_nonretweet: u64,
    pub n_set: u64,
    pub n_deleted_set: u64,
    pub n_lexicon: u64,
    pub n_deleted_lexicon: u64,
    pub deletion_ratio: f64,
    pub nonretweet_deletion_ratio: f64,
    pub set_deletion_ratio: f64,
    pub lexicon_deletion_ratio: f64,
    pub initial_deletions: u64,
    pub creation_window: Duration,
    pub deletion_window: Duration,
    /// Seconds; absent without deletions.
    pub lifetime_median: Option<f64>,
    pub lifetime_mean: Option<f64>,
    /// Deletions recorded before their creation; left out of the lifetimes.
    pub negative_lifetimes: u64,
    pub entropy_create: f64,
    pub entropy_delete: f64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn creation_order(records: &[TweetRecord]) -> Vec<&TweetRecord> {
    let mut sorted: Vec<&TweetRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.created, r.id));
    sorted
}

/// Length of the longest prefix, in `(created, id)` order, made only of
/// deleted single-engagement tweets.
pub fn initial_deletions(records: &[TweetRecord]) -> u64 {
    creation_order(records)
        .iter()
        .take_while(|r| r.is_single_engagement && r.is_deleted())
        .count() as u64
}

/// Shannon entropy in bits of the per-minute histogram, bins aligned to
/// epoch minutes.
pub fn minute_entropy(timestamps: &[Timestamp]) -> f64 {
    if timestamps.is_empty() {
        return 0.0;
    }
    let mut bins: HashMap<i64, u64> = HashMap::new();
    for t in timestamps {
        *bins.entry(t.minute_bin()).or_default() += 1;
    }
    let mut counts: Vec<u64> = bins.into_values().collect();
    // Summation order fixed so the result does not depend on hashing.
    counts.sort_unstable();
    let n = timestamps.len() as f64;
    let h: f64 = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum();
    h.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LifetimeStats {
    pub lifetimes: Vec<Duration>,
    pub median: Option<f64>,
    pub mean: Option<f64>,
    pub negative: u64,
}

/// Lifetimes of the deleted tweets, in record order.
pub fn lifetime_stats(records: &[TweetRecord]) -> LifetimeStats {
    let mut lifetimes = Vec::new();
    let mut negative = 0;
    for life in records.iter().filter_map(TweetRecord::lifetime) {
        if life.is_negative() {
            negative += 1;
        } else {
            lifetimes.push(life);
        }
    }
    let mut secs: Vec<i64> = lifetimes.iter().map(|d| d.as_secs()).collect();
    secs.sort_unstable();
    let n = secs.len();
    let median = match n {
        0 => None,
        _ if n % 2 == 1 => Some(secs[n / 2] as f64),
        _ => Some((secs[n / 2 - 1] as f64 + secs[n / 2] as f64) / 2.0),
    };
    let mean = (n > 0).then(|| secs.iter().map(|&s| s as f64).sum::<f64>() / n as f64);
    LifetimeStats {
        lifetimes,
        median,
        mean,
        negative,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FeatureError {
    #[error("no deleted lexicon or single-engagement tweets")]
    NoCandidates,
}

/// Creation and deletion spans over the deleted lexicon tweets, or over the
/// deleted single-engagement tweets when there are no deleted lexicon ones.
pub fn attack_windows(records: &[TweetRecord]) -> Result<(Duration, Duration), FeatureError> {
    let lexicon: Vec<&TweetRecord> = records
        .iter()
        .filter(|r| r.is_deleted() && r.is_lexicon)
        .collect();
    let subset = if lexicon.is_empty() {
        records
            .iter()
            .filter(|r| r.is_deleted() && r.is_single_engagement)
            .collect()
    } else {
        lexicon
    };
    let span = |ts: &mut dyn Iterator<Item = Timestamp>| {
        let (lo, hi) = ts.fold((None::<Timestamp>, None::<Timestamp>), |(lo, hi), t| {
            (Some(lo.map_or(t, |l| l.min(t))), Some(hi.map_or(t, |h| h.max(t))))
        });
        Some(hi? - lo?)
    };
    let created = span(&mut subset.iter().map(|r| r.created)).ok_or(FeatureError::NoCandidates)?;
    let deleted = span(&mut subset.iter().filter_map(|r| r.deleted_at)).ok_or(FeatureError::NoCandidates)?;
    Ok((created, deleted))
}

pub fn count_features(records: &[TweetRecord]) -> FeatureVector {
    let mut f = FeatureVector::default();
    for r in records {
        let del = r.is_deleted();
        f.n_tweets += 1;
        f.n_deleted += u64::from(del);
        if !r.is_retweet {
            f.n_nonretweet += 1;
            f.n_deleted_nonretweet += u64::from(del);
        }
        if r.is_single_engagement {
            f.n_set += 1;
            f.n_deleted_set += u64::from(del);
        }
        if r.is_lexicon {
            f.n_lexicon += 1;
            f.n_deleted_lexicon += u64::from(del);
        }
    }
    f.deletion_ratio = ratio(f.n_deleted, f.n_tweets);
    f.nonretweet_deletion_ratio = ratio(f.n_deleted_nonretweet, f.n_nonretweet);
    f.set_deletion_ratio = ratio(f.n_deleted_set, f.n_set);
    f.lexicon_deletion_ratio = ratio(f.n_deleted_lexicon, f.n_lexicon);
    f.initial_deletions = initial_deletions(records);
    (f.creation_window, f.deletion_window) = attack_windows(records).unwrap_or_default();
    let life = lifetime_stats(records);
    f.lifetime_median = life.median;
    f.lifetime_mean = life.mean;
    f.negative_lifetimes = life.negative;
    let created: Vec<Timestamp> = records.iter().map(|r| r.created).collect();
    let deleted: Vec<Timestamp> = records.iter().filter_map(|r| r.deleted_at).collect();
    f.entropy_create = minute_entropy(&created);
    f.entropy_delete = minute_entropy(&deleted);
    f
}

/// Column order of the feature CSV.
pub const FEATURE_COLUMNS: [&str; 22] = [
    "date",
    "keyword",
    "n_tweets",
    "n_deleted",
    "n_nonretweet",
    "n_deleted_nonretweet",
    "n_set",
    "n_deleted_set",
    "n_lexicon",
    "n_deleted_lexicon",
    "deletion_ratio",
    "nonretweet_deletion_ratio",
    "set_deletion_ratio",
    "lexicon_deletion_ratio",
    "initial_deletions",
    "creation_window_s",
    "deletion_window_s",
    "lifetime_median_s",
    "lifetime_mean_s",
    "negative_lifetimes",
    "entropy_create",
    "entropy_delete",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_features_csv<W: Write>(out: W, rows: &[(TrendDay, FeatureVector)]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FEATURE_COLUMNS)?;
    for (trend, f) in rows {
        w.write_record([
            trend.date.to_string(),
            trend.keyword.canonical(),
            f.n_tweets.to_string(),
            f.n_deleted.to_string(),
            f.n_nonretweet.to_string(),
            f.n_deleted_nonretweet.to_string(),
            f.n_set.to_string(),
            f.n_deleted_set.to_string(),
            f.n_lexicon.to_string(),
            f.n_deleted_lexicon.to_string(),
            f.deletion_ratio.to_string(),
            f.nonretweet_deletion_ratio.to_string(),
            f.set_deletion_ratio.to_string(),
            f.lexicon_deletion_ratio.to_string(),
            f.initial_deletions.to_string(),
            f.creation_window.as_secs().to_string(),
            f.deletion_window.as_secs().to_string(),
            opt(f.lifetime_median),
            opt(f.lifetime_mean),
            f.negative_lifetimes.to_string(),
            f.entropy_create.to_string(),
            f.entropy_delete.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
