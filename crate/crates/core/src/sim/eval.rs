//! Detector scoring against simulated ground truth.

use std::collections::BTreeSet;
use std::io::{self, Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{LabeledStream, TruthRow};
use crate::classify::ContentClassifier;
use crate::detect::{classify_trend, DetectorConfig, Verdict};
use crate::features::{classify_instance, count_features};
use crate::ingest::Corpus;
use crate::model::{normalize_keyword, Locale};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct EvalReport {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl EvalReport {
    /// Scores `(predicted, actual)` pairs. Empty denominators give 0.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let mut r = Self::default();
        for (pred, actual) in pairs {
            match (pred, actual) {
                (true, true) => r.tp += 1,
                (true, false) => r.fp += 1,
                (false, false) => r.tn += 1,
                (false, true) => r.fn_ += 1,
            }
        }
        let div = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        r.precision = div(r.tp, r.tp + r.fp);
        r.recall = div(r.tp, r.tp + r.fn_);
        let s = r.precision + r.recall;
        r.f1 = if s == 0.0 { 0.0 } else { 2.0 * r.precision * r.recall / s };
        r
    }
}

/// Runs the detector on every trending keyword-day of `stream` and scores
/// the verdicts. Verdicts come back in truth order.
pub fn evaluate(
    stream: &LabeledStream,
    config: &DetectorConfig,
    classifier: &ContentClassifier,
) -> (EvalReport, Vec<Verdict>) {
    let corpus = Corpus::from_events(&stream.events);
    let tz = stream.config.tz();
    let mut pairs = Vec::new();
    let mut verdicts = Vec::new();
    for row in stream.truth.iter().filter(|r| r.trending) {
        let day = row.trend_day();
        let inst = corpus.instance(&day, classifier.locale, tz);
        let features = count_features(&classify_instance(classifier, &inst));
        let v = classify_trend(&day, &features, config);
        pairs.push((v.attacked, row.attacked));
        verdicts.push(v);
    }
    (EvalReport::from_pairs(pairs), verdicts)
}

#[derive(Debug, thiserror::Error)]
pub enum TruthError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("line {line}: {msg}")]
    Row { line: u64, msg: String },
}

#[derive(Serialize, Deserialize)]
struct TruthRecord {
    date: NaiveDate,
    keyword: String,
    attacked: bool,
    trending: bool,
}

/// Columns `date,keyword,attacked,trending`.
pub fn write_truth_csv<W: Write>(out: W, rows: &[TruthRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(TruthRecord {
            date: r.date,
            keyword: r.keyword.canonical(),
            attacked: r.attacked,
            trending: r.trending,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_truth_csv<R: Read>(source: R, locale: Locale) -> Result<Vec<TruthRow>, TruthError> {
    let mut rd = csv::Reader::from_reader(source);
    let mut rows = Vec::new();
    for rec in rd.deserialize::<TruthRecord>() {
        let rec = rec?;
        let keyword = normalize_keyword(&rec.keyword, locale).map_err(|e| TruthError::Row {
            line: rows.len() as u64 + 2,
            msg: e.to_string(),
        })?;
        rows.push(TruthRow {
            date: rec.date,
            keyword,
            attacked: rec.attacked,
            trending: rec.trending,
        });
    }
    Ok(rows)
}

/// One user id per line, ascending.
pub fn write_bots<W: Write>(mut out: W, bots: &BTreeSet<u64>) -> io::Result<()> {
    for b in bots {
        writeln!(out, "{b}")?;
    }
    out.flush()
}
