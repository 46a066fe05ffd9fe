//! Trend-day lists and ranked trend-list snapshots (epochs).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::model::{normalize_keyword, Keyword, KeywordError, Locale, Timestamp};

/// Longest trend list a snapshot may carry.
pub const MAX_TREND_LIST: usize = 50;

/// One keyword trending on one calendar day. Keywords trending on several
/// days yield one `TrendDay` per day.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TrendDay {
    pub date: NaiveDate,
    pub keyword: Keyword,
}

impl TrendDay {
    pub fn new(date: NaiveDate, keyword: Keyword) -> Self {
        Self { date, keyword }
    }

    /// Stable label such as `2019-07-01/#tag`.
    pub fn label(&self) -> String {
        format!("{}/{}", self.date, self.keyword.canonical())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendEntry {
    pub rank: u32,
    pub keyword: Keyword,
    pub volume: Option<u64>,
}

/// One snapshot of a location's ranked trend list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendEpoch {
    pub captured_at: Timestamp,
    pub location: String,
    pub entries: Vec<TrendEntry>,
}

impl TrendEpoch {
    pub fn rank_of(&self, keyword: &Keyword) -> Option<u32> {
        self.entries
            .iter()
            .find(|e| &e.keyword == keyword)
            .map(|e| e.rank)
    }

    pub fn entry(&self, keyword: &Keyword) -> Option<&TrendEntry> {
        self.entries.iter().find(|e| &e.keyword == keyword)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TrendFileError {
    #[error("epoch {captured_at} ({location}): ranks must run 1..n without gaps, got {ranks:?}")]
    BadRank {
        captured_at: String,
        location: String,
        ranks: Vec<u32>,
    },
    #[error("unparsable timestamp `{0}`")]
    BadTimestamp(String),
    #[error("unparsable date `{0}`")]
    BadDate(String),
    #[error("bad keyword on line {line}: {source}")]
    Keyword {
        line: u64,
        #[source]
        source: KeywordError,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Deserialize)]
struct DayRow {
    date: String,
    keyword: String,
}

/// Reads a `date,keyword` CSV. Duplicate (date, keyword) pairs collapse.
pub fn load_trend_days<R: Read>(source: R, locale: Locale) -> Result<Vec<TrendDay>, TrendFileError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let mut days = BTreeSet::new();
    for (i, row) in reader.deserialize::<DayRow>().enumerate() {
        let row = row?;
        let date = NaiveDate::parse_from_str(&row.date, "%Y-%m-%d")
            .map_err(|_| TrendFileError::BadDate(row.date.clone()))?;
        let keyword = normalize_keyword(&row.keyword, locale).map_err(|source| {
            TrendFileError::Keyword {
                line: i as u64 + 2,
                source,
            }
        })?;
        days.insert(TrendDay { date, keyword });
    }
    Ok(days.into_iter().collect())
}

pub fn write_trend_days<W: Write>(out: W, days: &[TrendDay]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["date", "keyword"])?;
    for d in days {
        w.write_record([d.date.to_string(), d.keyword.raw().to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct EpochRow {
    captured_at: String,
    location: String,
    rank: u32,
    keyword: String,
    volume: Option<u64>,
}

/// Reads a `captured_at,location,rank,keyword,volume` CSV into epochs sorted
/// by capture time (then location). An empty volume cell means the platform
/// reported none.
pub fn load_trend_epochs<R: Read>(
    source: R,
    locale: Locale,
) -> Result<Vec<TrendEpoch>, TrendFileError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(source);
    let mut grouped: BTreeMap<(Timestamp, String), Vec<TrendEntry>> = BTreeMap::new();
    for (i, row) in reader.deserialize::<EpochRow>().enumerate() {
        let row = row?;
        let captured_at = Timestamp::parse_iso(&row.captured_at)
            .ok_or_else(|| TrendFileError::BadTimestamp(row.captured_at.clone()))?;
        let keyword = normalize_keyword(&row.keyword, locale).map_err(|source| {
            TrendFileError::Keyword {
                line: i as u64 + 2,
                source,
            }
        })?;
        grouped
            .entry((captured_at, row.location))
            .or_default()
            .push(TrendEntry {
                rank: row.rank,
                keyword,
                volume: row.volume,
            });
    }

    grouped
        .into_iter()
        .map(|((captured_at, location), mut entries)| {
            entries.sort_by_key(|e| e.rank);
            let contiguous = entries
                .iter()
                .enumerate()
                .all(|(i, e)| e.rank as usize == i + 1);
            if !contiguous || entries.len() > MAX_TREND_LIST {
                return Err(TrendFileError::BadRank {
                    captured_at: captured_at.to_iso(),
                    location,
                    ranks: entries.iter().map(|e| e.rank).collect(),
                });
            }
            Ok(TrendEpoch {
                captured_at,
                location,
                entries,
            })
        })
        .collect()
}

pub fn write_trend_epochs<W: Write>(out: W, epochs: &[TrendEpoch]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["captured_at", "location", "rank", "keyword", "volume"])?;
    for ep in epochs {
        for e in &ep.entries {
            w.write_record([
                ep.captured_at.to_iso(),
                ep.location.clone(),
                e.rank.to_string(),
                e.keyword.raw().to_string(),
                e.volume.map(|v| v.to_string()).unwrap_or_default(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "captured_at,location,rank,keyword,volume\n";

    #[test]
    fn single_row_epoch() {
        let csv = format!("{HEADER}1970-01-01T00:00:00Z,Turkey,1,#a,12000\n");
        let epochs = load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap();
        assert_eq!(epochs.len(), 1);
        assert_eq!(epochs[0].captured_at, Timestamp::from_secs(0));
        assert_eq!(epochs[0].entries[0].rank, 1);
        assert_eq!(epochs[0].entries[0].keyword.canonical(), "#a");
        assert_eq!(epochs[0].entries[0].volume, Some(12000));
    }

    #[test]
    fn missing_volume_is_absent() {
        let csv = format!("{HEADER}2019-07-01T00:00:00Z,Turkey,1,#a,\n");
        let epochs = load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap();
        assert_eq!(epochs[0].entries[0].volume, None);
    }

    #[test]
    fn rank_gap_rejected() {
        let csv = format!(
            "{HEADER}2019-07-01T00:00:00Z,Turkey,1,#a,\n2019-07-01T00:00:00Z,Turkey,3,#b,\n"
        );
        let err = load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap_err();
        assert!(matches!(err, TrendFileError::BadRank { .. }), "{err}");
    }

    #[test]
    fn bad_timestamp_rejected() {
        let csv = format!("{HEADER}yesterday,Turkey,1,#a,\n");
        assert!(matches!(
            load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap_err(),
            TrendFileError::BadTimestamp(_)
        ));
    }

    #[test]
    fn epochs_sorted_and_grouped() {
        let csv = format!(
            "{HEADER}2019-07-01T00:05:00Z,Turkey,2,#b,\n2019-07-01T00:05:00Z,Turkey,1,#a,\n2019-07-01T00:00:00Z,Turkey,1,#c,\n2019-07-01T00:00:00Z,World,1,#d,\n"
        );
        let epochs = load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap();
        assert_eq!(epochs.len(), 3);
        assert!(epochs.windows(2).all(|w| w[0].captured_at <= w[1].captured_at));
        let last = &epochs[2];
        assert_eq!(last.entries.len(), 2);
        assert_eq!(last.entries[0].keyword.canonical(), "#a");
    }

    #[test]
    fn trend_days_dedup() {
        let csv = "date,keyword\n2019-07-01,#Tag\n2019-07-01,#tag\n2019-07-02,#tag\n";
        let days = load_trend_days(csv.as_bytes(), Locale::Tr).unwrap();
        assert_eq!(days.len(), 2);
        assert_eq!(days[0].label(), "2019-07-01/#tag");
    }

    #[test]
    fn epoch_csv_round_trip() {
        let csv = format!("{HEADER}2019-07-01T00:00:00Z,Turkey,1,#a,12000\n2019-07-01T00:00:00Z,Turkey,2,b c,\n");
        let epochs = load_trend_epochs(csv.as_bytes(), Locale::Tr).unwrap();
        let mut out = Vec::new();
        write_trend_epochs(&mut out, &epochs).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), csv);
    }
}
