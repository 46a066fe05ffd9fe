//! How far attacked trends get: time on the list, speed of entry,
//! prevalence among top entries, and related reports.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;

use chrono::NaiveDate;
use serde::Serialize;

use crate::detect::Verdict;
use crate::features::TweetRecord;
use crate::ingest::{TrendDay, TrendEpoch};
use crate::model::{haversine_km, Duration, GeoPoint, Keyword, Timestamp, TzOffset};

/// Spacing of trend-list snapshots.
pub const EPOCH_INTERVAL: Duration = Duration::seconds(300);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    #[error("keyword `{0}` never appears in the trend lists")]
    NeverTrended(String),
    #[error("no tweets before the keyword entered the trend list")]
    NoPriorTweets,
    #[error("fewer than two located tweets inside the window")]
    InsufficientPoints,
}

/// First stay of a keyword on the list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TrendLifecycle {
    pub keyword: String,
    pub first_entry: Timestamp,
    /// First snapshot without the keyword after the entry, or one interval
    /// past the last snapshot when the keyword is still listed there.
    pub first_exit: Timestamp,
    pub initial_rank: u32,
    pub best_rank: u32,
}

impl TrendLifecycle {
    pub fn time_on_list(&self) -> Duration {
        self.first_exit - self.first_entry
    }
}

/// `epochs` must be sorted by capture time and come from one location.
pub fn lifecycle(
    keyword: &Keyword,
    epochs: &[TrendEpoch],
    interval: Duration,
) -> Result<TrendLifecycle, MetricsError> {
    let start = epochs
        .iter()
        .position(|e| e.rank_of(keyword).is_some())
        .ok_or_else(|| MetricsError::NeverTrended(keyword.canonical()))?;
    let initial_rank = epochs[start].rank_of(keyword).expect("found above");
    let mut best_rank = initial_rank;
    let mut first_exit = None;
    for e in &epochs[start + 1..] {
        match e.rank_of(keyword) {
            Some(r) => best_rank = best_rank.min(r),
            None => {
                first_exit = Some(e.captured_at);
                break;
            }
        }
    }
    let last = epochs.last().expect("non-empty").captured_at;
    Ok(TrendLifecycle {
        keyword: keyword.canonical(),
        first_entry: epochs[start].captured_at,
        first_exit: first_exit.unwrap_or(last + interval),
        initial_rank,
        best_rank,
    })
}

/// Entry time minus the median creation time of the tweets posted before
/// the entry. An even count takes the floor of the middle pair's mean.
pub fn trend_speed(records: &[TweetRecord], life: &TrendLifecycle) -> Result<Duration, MetricsError> {
    let mut before: Vec<i64> = records
        .iter()
        .filter(|r| r.created < life.first_entry)
        .map(|r| r.created.secs())
        .collect();
    if before.is_empty() {
        return Err(MetricsError::NoPriorTweets);
    }
    before.sort_unstable();
    let n = before.len();
    let median = if n % 2 == 1 {
        before[n / 2]
    } else {
        (before[n / 2 - 1] + before[n / 2]).div_euclid(2)
    };
    let speed = life.first_entry - Timestamp::from_secs(median);
    assert!(!speed.is_negative(), "median of earlier tweets after entry");
    Ok(speed)
}

/// Share of pre-entry tweets that were also deleted before the entry.
pub fn pre_entry_deletion_ratio(records: &[TweetRecord], life: &TrendLifecycle) -> f64 {
    let before: Vec<&TweetRecord> = records.iter().filter(|r| r.created < life.first_entry).collect();
    if before.is_empty() {
        return 0.0;
    }
    let gone = before
        .iter()
        .filter(|r| r.deleted_at.is_some_and(|d| d < life.first_entry))
        .count();
    gone as f64 / before.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrevalenceDay {
    pub date: NaiveDate,
    pub attacked: usize,
    pub entrants: usize,
    pub fraction: f64,
}

/// Per local day: attacked keywords among the distinct keywords seen at rank
/// `k` or better that day. Days without entrants are omitted.
pub fn prevalence(verdicts: &[Verdict], epochs: &[TrendEpoch], k: u32, tz: TzOffset) -> Vec<PrevalenceDay> {
    let attacked: HashSet<(NaiveDate, &str)> = verdicts
        .iter()
        .filter(|v| v.attacked)
        .map(|v| (v.date, v.keyword.as_str()))
        .collect();
    let mut entrants: BTreeMap<NaiveDate, BTreeSet<String>> = BTreeMap::new();
    for e in epochs {
        let date = e.captured_at.local_date(tz);
        for entry in e.entries.iter().filter(|x| x.rank <= k) {
            entrants.entry(date).or_default().insert(entry.keyword.canonical());
        }
    }
    entrants
        .into_iter()
        .map(|(date, kws)| {
            let hit = kws.iter().filter(|kw| attacked.contains(&(date, kw.as_str()))).count();
            PrevalenceDay {
                date,
                attacked: hit,
                entrants: kws.len(),
                fraction: hit as f64 / kws.len() as f64,
            }
        })
        .collect()
}

/// Unweighted mean over days.
pub fn mean_prevalence(days: &[PrevalenceDay]) -> Option<f64> {
    (!days.is_empty()).then(|| days.iter().map(|d| d.fraction).sum::<f64>() / days.len() as f64)
}

pub fn entry_hour_histogram<'a>(lifecycles: impl IntoIterator<Item = &'a TrendLifecycle>, tz: TzOffset) -> [u64; 24] {
    let mut bins = [0u64; 24];
    for l in lifecycles {
        bins[l.first_entry.local_hour(tz) as usize] += 1;
    }
    bins
}

/// Path length in km through the located tweets of one user, in time order,
/// over `[t0, t0 + window)` where `t0` is the earliest point.
pub fn user_travel_distance(points: &[(Timestamp, GeoPoint)], window: Duration) -> Result<f64, MetricsError> {
    let mut sorted: Vec<&(Timestamp, GeoPoint)> = points.iter().collect();
    sorted.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.lat().total_cmp(&b.1.lat()))
            .then(a.1.lon().total_cmp(&b.1.lon()))
    });
    let Some(first) = sorted.first() else {
        return Err(MetricsError::InsufficientPoints);
    };
    let end = first.0 + window;
    let inside: Vec<&GeoPoint> = sorted.iter().take_while(|p| p.0 < end).map(|p| &p.1).collect();
    if inside.len() < 2 {
        return Err(MetricsError::InsufficientPoints);
    }
    Ok(inside.windows(2).map(|w| haversine_km(*w[0], *w[1])).sum())
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VolumeRow {
    pub class: &'static str,
    pub n_trends: usize,
    pub median_undeleted: Option<f64>,
    /// Over trends with at least one reported volume on their date.
    pub median_volume: Option<f64>,
}

/// Median undeleted tweet count and median reported volume (the largest
/// volume shown on the trend's local date), attacked versus other trends.
/// Classes without trends produce no row.
pub fn volume_report(
    trends: &[(TrendDay, bool, u64)],
    epochs: &[TrendEpoch],
    tz: TzOffset,
) -> Vec<VolumeRow> {
    let mut peak: HashMap<(NaiveDate, &Keyword), u64> = HashMap::new();
    for e in epochs {
        let date = e.captured_at.local_date(tz);
        for entry in &e.entries {
            if let Some(v) = entry.volume {
                let slot = peak.entry((date, &entry.keyword)).or_insert(v);
                *slot = (*slot).max(v);
            }
        }
    }
    [("attacked", true), ("other", false)]
        .into_iter()
        .filter_map(|(class, flag)| {
            let members: Vec<&(TrendDay, bool, u64)> = trends.iter().filter(|t| t.1 == flag).collect();
            if members.is_empty() {
                return None;
            }
            let mut undeleted: Vec<f64> = members.iter().map(|t| t.2 as f64).collect();
            let mut volumes: Vec<f64> = members
                .iter()
                .filter_map(|t| peak.get(&(t.0.date, &t.0.keyword)).map(|&v| v as f64))
                .collect();
            Some(VolumeRow {
                class,
                n_trends: members.len(),
                median_undeleted: median(&mut undeleted),
                median_volume: median(&mut volumes),
            })
        })
        .collect()
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_lifecycles_csv<W: Write>(out: W, rows: &[TrendLifecycle]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["keyword", "first_entry", "first_exit", "minutes_on_list", "initial_rank", "best_rank"])?;
    for l in rows {
        w.write_record([
            l.keyword.clone(),
            l.first_entry.to_iso(),
            l.first_exit.to_iso(),
            (l.time_on_list().as_secs() as f64 / 60.0).to_string(),
            l.initial_rank.to_string(),
            l.best_rank.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(out: W, bins: &[u64]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["bin", "count"])?;
    for (i, c) in bins.iter().enumerate() {
        w.write_record([i.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_prevalence_csv<W: Write>(out: W, days: &[PrevalenceDay]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "attacked", "entrants", "fraction"])?;
    for d in days {
        w.write_record([
            d.date.to_string(),
            d.attacked.to_string(),
            d.entrants.to_string(),
            d.fraction.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_volume_csv<W: Write>(out: W, rows: &[VolumeRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["class", "n_trends", "median_undeleted", "median_volume"])?;
    for r in rows {
        w.write_record([
            r.class.to_string(),
            r.n_trends.to_string(),
            opt(r.median_undeleted),
            opt(r.median_volume),
        ])?;
    }
    w.flush()?;
    Ok(())
}
