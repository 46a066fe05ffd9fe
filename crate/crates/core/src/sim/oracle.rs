//! A toy trending algorithm with an optional deletion penalty.
//!
//! A keyword's score at snapshot time `t` is the number of distinct users
//! who posted it during `[t − window, t)`. With mitigation on, the score
//! drops by `penalty_weight` for every deletion of a keyword tweet during
//! the same window. Keywords scoring at least `min_score` are ranked.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::ingest::{TrendEntry, TrendEpoch};
use crate::model::{Duration, Keyword, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivityTweet {
    pub created: Timestamp,
    pub user: u64,
    pub deleted: Option<Timestamp>,
}

/// Every tweet of one keyword, before sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct KeywordActivity {
    pub keyword: Keyword,
    pub tweets: Vec<ActivityTweet>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleParams {
    pub window: Duration,
    pub interval: Duration,
    /// Length of each snapshot list.
    pub list_len: usize,
    pub min_score: f64,
    pub mitigation: bool,
    pub penalty_weight: f64,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            window: Duration::minutes(30),
            interval: Duration::minutes(5),
            list_len: 50,
            min_score: 100.0,
            mitigation: false,
            penalty_weight: 2.0,
        }
    }
}

pub const ORACLE_LOCATION: &str = "Simulated";

fn snapshot_index(t: i64, start: i64, step: i64) -> i64 {
    (t - start).div_euclid(step)
}

/// Snapshots every `interval` from `start` (inclusive) to `end` (exclusive).
/// Ties in score are broken by keyword. The reported volume is the number of
/// keyword tweets posted during the previous 24 hours.
pub fn trend_oracle(
    activity: &[KeywordActivity],
    params: &OracleParams,
    start: Timestamp,
    end: Timestamp,
) -> Vec<TrendEpoch> {
    let step = params.interval.as_secs().max(1);
    let (s0, e0) = (start.secs(), end.secs());
    let n_snap = ((e0 - s0 + step - 1) / step).max(0) as usize;
    let w = params.window.as_secs();
    let day = Duration::days(1).as_secs();

    let mut scored: Vec<Vec<(f64, usize, u64)>> = vec![Vec::new(); n_snap];
    for (ki, act) in activity.iter().enumerate() {
        let mut created: Vec<(i64, u64)> = act.tweets.iter().map(|t| (t.created.secs(), t.user)).collect();
        created.sort_unstable();
        let mut deleted: Vec<i64> = act.tweets.iter().filter_map(|t| t.deleted.map(|d| d.secs())).collect();
        deleted.sort_unstable();
        let Some(&(first, _)) = created.first() else {
            continue;
        };
        let last = created.last().expect("non-empty").0;
        // Snapshots whose window can contain a creation.
        let lo = snapshot_index(first, s0, step).max(0) + 1;
        let hi = (snapshot_index(last + w, s0, step) + 1).min(n_snap as i64 - 1);
        let mut users: HashMap<u64, u32> = HashMap::new();
        let (mut c_in, mut c_out) = (0usize, 0usize);
        let (mut d_in, mut d_out) = (0usize, 0usize);
        let (mut v_in, mut v_out) = (0usize, 0usize);
        for snap in lo.max(0)..=hi {
            let t = s0 + snap * step;
            while c_in < created.len() && created[c_in].0 < t {
                *users.entry(created[c_in].1).or_default() += 1;
                c_in += 1;
            }
            while c_out < c_in && created[c_out].0 < t - w {
                let u = created[c_out].1;
                let c = users.get_mut(&u).expect("entered");
                *c -= 1;
                if *c == 0 {
                    users.remove(&u);
                }
                c_out += 1;
            }
            while d_in < deleted.len() && deleted[d_in] < t {
                d_in += 1;
            }
            while d_out < d_in && deleted[d_out] < t - w {
                d_out += 1;
            }
            while v_in < created.len() && created[v_in].0 < t {
                v_in += 1;
            }
            while v_out < v_in && created[v_out].0 < t - day {
                v_out += 1;
            }
            let mut score = users.len() as f64;
            if params.mitigation {
                score -= params.penalty_weight * (d_in - d_out) as f64;
            }
            if score >= params.min_score && score > 0.0 {
                scored[snap as usize].push((score, ki, (v_in - v_out) as u64));
            }
        }
    }

    let mut epochs = Vec::new();
    for (snap, mut list) in scored.into_iter().enumerate() {
        if list.is_empty() {
            continue;
        }
        list.sort_by(|a, b| {
            b.0.total_cmp(&a.0)
                .then_with(|| activity[a.1].keyword.cmp(&activity[b.1].keyword))
        });
        list.truncate(params.list_len);
        epochs.push(TrendEpoch {
            captured_at: Timestamp::from_secs(s0 + snap as i64 * step),
            location: ORACLE_LOCATION.to_string(),
            entries: list
                .into_iter()
                .enumerate()
                .map(|(i, (_, ki, volume))| TrendEntry {
                    rank: i as u32 + 1,
                    keyword: activity[ki].keyword.clone(),
                    volume: Some(volume),
                })
                .collect(),
        });
    }
    epochs
}

/// Best rank each listed keyword reached.
pub fn best_ranks(epochs: &[TrendEpoch]) -> BTreeMap<Keyword, u32> {
    let mut best: BTreeMap<Keyword, u32> = BTreeMap::new();
    for e in epochs {
        for entry in &e.entries {
            let slot = best.entry(entry.keyword.clone()).or_insert(entry.rank);
            *slot = (*slot).min(entry.rank);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{normalize_keyword, Locale};

    fn kw(s: &str) -> Keyword {
        normalize_keyword(s, Locale::Tr).unwrap()
    }

    fn burst(k: &str, n: u64, t0: i64, deleted_after: Option<i64>) -> KeywordActivity {
        KeywordActivity {
            keyword: kw(k),
            tweets: (0..n)
                .map(|u| ActivityTweet {
                    created: Timestamp::from_secs(t0 + (u % 60) as i64),
                    user: u,
                    deleted: deleted_after.map(|d| Timestamp::from_secs(t0 + 60 + d)),
                })
                .collect(),
        }
    }

    fn params(mitigation: bool) -> OracleParams {
        OracleParams {
            min_score: 1.0,
            mitigation,
            ..Default::default()
        }
    }

    #[test]
    fn attack_enters_without_mitigation_only() {
        let act = [burst("#saldiri", 400, 3000, Some(100)), burst("#dogal", 50, 3000, None)];
        let (start, end) = (Timestamp::from_secs(0), Timestamp::from_secs(7200));
        let off = best_ranks(&trend_oracle(&act, &params(false), start, end));
        assert_eq!(off.get(&kw("#saldiri")), Some(&1));
        let on = best_ranks(&trend_oracle(&act, &params(true), start, end));
        assert_eq!(on.get(&kw("#saldiri")), None);
        assert_eq!(on.get(&kw("#dogal")), Some(&1));
    }

    #[test]
    fn window_is_half_open() {
        // Tweets in [3000, 3060); the snapshot at 3000 sees none of them.
        let act = [burst("#a", 10, 3000, None)];
        let epochs = trend_oracle(&act, &params(false), Timestamp::from_secs(0), Timestamp::from_secs(6000));
        assert_eq!(epochs.first().unwrap().captured_at, Timestamp::from_secs(3300));
        assert_eq!(epochs.first().unwrap().entries[0].volume, Some(10));
        // Gone once the window has passed the last creation.
        assert_eq!(epochs.last().unwrap().captured_at, Timestamp::from_secs(4800));
    }

    #[test]
    fn ranking_and_min_score() {
        let act = [burst("#b", 20, 0, None), burst("#a", 20, 0, None), burst("#c", 30, 0, None)];
        let p = OracleParams {
            min_score: 25.0,
            ..params(false)
        };
        let epochs = trend_oracle(&act, &p, Timestamp::from_secs(0), Timestamp::from_secs(600));
        assert_eq!(epochs[0].entries.len(), 1);
        let epochs = trend_oracle(&act, &params(false), Timestamp::from_secs(0), Timestamp::from_secs(600));
        let order: Vec<String> = epochs[0].entries.iter().map(|e| e.keyword.canonical()).collect();
        assert_eq!(order, ["#c", "#a", "#b"]);
    }
}
