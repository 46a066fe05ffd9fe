//! Locating individual attacks inside a trend instance.
//!
//! An attack is a set of at least κ deleted single-engagement tweets, one per
//! account, created within α_p of each other, deleted within α_d of each
//! other, each living at most θ. Attacks are extracted greedily: the largest
//! qualifying set is taken out, then the search repeats on what is left.
//! Among equally large sets the one whose sorted `(created, id)` keys are
//! lexicographically smallest wins, so the result is unique.
//!
//! Spans and lifetimes use whole seconds.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::features::TweetRecord;
use crate::model::{Duration, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct AttackParams {
    pub kappa: usize,
    pub alpha_p: Duration,
    pub alpha_d: Duration,
    pub theta: Duration,
    /// Only lexicon tweets are attack candidates.
    pub require_lexicon: bool,
}

impl Default for AttackParams {
    fn default() -> Self {
        Self {
            kappa: 4,
            alpha_p: Duration::seconds(300),
            alpha_d: Duration::seconds(300),
            theta: Duration::seconds(600),
            require_lexicon: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamError {
    #[error("kappa must be at least 1")]
    ZeroKappa,
    #[error("{0} must not be negative")]
    Negative(&'static str),
}

impl AttackParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        if self.kappa == 0 {
            return Err(ParamError::ZeroKappa);
        }
        for (name, d) in [("alpha_p", self.alpha_p), ("alpha_d", self.alpha_d), ("theta", self.theta)] {
            if d.is_negative() {
                return Err(ParamError::Negative(name));
            }
        }
        Ok(())
    }

    fn is_candidate(&self, r: &TweetRecord) -> bool {
        r.is_single_engagement
            && (r.is_lexicon || !self.require_lexicon)
            && r
                .lifetime()
                .is_some_and(|l| !l.is_negative() && l <= self.theta)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AttackEvent {
    /// Ascending.
    pub tweet_ids: Vec<u64>,
    /// Ascending.
    pub users: Vec<u64>,
    /// Earliest creation.
    pub start: Timestamp,
    /// Latest deletion.
    pub end: Timestamp,
    pub creation_window: Duration,
    pub deletion_window: Duration,
    pub max_lifetime: Duration,
}

impl AttackEvent {
    fn from_members(members: &[&TweetRecord]) -> Self {
        let created = members.iter().map(|r| r.created);
        let deleted = members.iter().filter_map(|r| r.deleted_at);
        let p_lo = created.clone().map(|t| t.secs()).min().unwrap_or(0);
        let p_hi = created.clone().map(|t| t.secs()).max().unwrap_or(0);
        let d_lo = deleted.clone().map(|t| t.secs()).min().unwrap_or(0);
        let d_hi = deleted.clone().map(|t| t.secs()).max().unwrap_or(0);
        let mut tweet_ids: Vec<u64> = members.iter().map(|r| r.id).collect();
        tweet_ids.sort_unstable();
        let mut users: Vec<u64> = members.iter().map(|r| r.user).collect();
        users.sort_unstable();
        Self {
            tweet_ids,
            users,
            start: created.min().unwrap_or_default(),
            end: deleted.max().unwrap_or_default(),
            creation_window: Duration::seconds(p_hi - p_lo),
            deletion_window: Duration::seconds(d_hi - d_lo),
            max_lifetime: members
                .iter()
                .filter_map(|r| r.lifetime())
                .max()
                .unwrap_or(Duration::ZERO),
        }
    }

    pub fn size(&self) -> usize {
        self.tweet_ids.len()
    }

    /// Size, span and lifetime conditions plus one tweet per account.
    pub fn satisfies(&self, params: &AttackParams) -> bool {
        let distinct_users = self.users.windows(2).all(|w| w[0] != w[1]);
        self.size() >= params.kappa
            && distinct_users
            && self.creation_window <= params.alpha_p
            && self.deletion_window <= params.alpha_d
            && self.max_lifetime <= params.theta
    }
}

type Key = (Timestamp, u64);

/// Largest valid subset of `cands` (indices into it), smallest keys on ties.
fn best_subset(cands: &[&TweetRecord], params: &AttackParams) -> Vec<usize> {
    let ap = params.alpha_p.as_secs();
    let ad = params.alpha_d.as_secs();
    let p = |i: usize| cands[i].created.secs();
    let d = |i: usize| cands[i].deleted_at.expect("candidates are deleted").secs();

    let mut by_created: Vec<usize> = (0..cands.len()).collect();
    by_created.sort_by_key(|&i| (p(i), cands[i].created, cands[i].id));

    let mut best: Vec<usize> = Vec::new();
    let mut best_keys: Vec<Key> = Vec::new();
    let mut counts: HashMap<u64, usize> = HashMap::new();
    let mut hi = 0;
    for lo in 0..by_created.len() {
        // Boxes anchored at the same creation second coincide.
        if lo > 0 && p(by_created[lo]) == p(by_created[lo - 1]) {
            continue;
        }
        let p0 = p(by_created[lo]);
        while hi < by_created.len() && p(by_created[hi]) <= p0 + ap {
            hi += 1;
        }
        let mut window: Vec<usize> = by_created[lo..hi].to_vec();
        window.sort_by_key(|&i| d(i));

        // Slide a deletion box over the creation window.
        counts.clear();
        let mut end = 0;
        let mut distinct = 0usize;
        for start in 0..window.len() {
            if start > 0 && d(window[start]) == d(window[start - 1]) {
                continue;
            }
            let d0 = d(window[start]);
            while end < window.len() && d(window[end]) <= d0 + ad {
                let c = counts.entry(cands[window[end]].user).or_default();
                if *c == 0 {
                    distinct += 1;
                }
                *c += 1;
                end += 1;
            }
            if distinct >= best.len().max(1) {
                let chosen = earliest_per_user(cands, &window[start..end]);
                let keys = sorted_keys(cands, &chosen);
                if chosen.len() > best.len() || keys < best_keys {
                    best = chosen;
                    best_keys = keys;
                }
            }
            // Drop every tweet sharing this deletion second before moving on.
            let mut k = start;
            while k < window.len() && d(window[k]) == d0 {
                let c = counts.get_mut(&cands[window[k]].user).expect("counted");
                *c -= 1;
                if *c == 0 {
                    distinct -= 1;
                }
                k += 1;
            }
        }
    }
    best
}

fn earliest_per_user(cands: &[&TweetRecord], members: &[usize]) -> Vec<usize> {
    let mut first: HashMap<u64, usize> = HashMap::new();
    for &i in members {
        let key = (cands[i].created, cands[i].id);
        first
            .entry(cands[i].user)
            .and_modify(|j| {
                if key < (cands[*j].created, cands[*j].id) {
                    *j = i;
                }
            })
            .or_insert(i);
    }
    first.into_values().collect()
}

fn sorted_keys(cands: &[&TweetRecord], chosen: &[usize]) -> Vec<Key> {
    let mut keys: Vec<Key> = chosen.iter().map(|&i| (cands[i].created, cands[i].id)).collect();
    keys.sort_unstable();
    keys
}

/// Attacks found in the records of one trend instance, ordered by start
/// time. No tweet belongs to two attacks.
pub fn detect_attack_windows(records: &[TweetRecord], params: &AttackParams) -> Vec<AttackEvent> {
    let mut cands: Vec<&TweetRecord> = records.iter().filter(|r| params.is_candidate(r)).collect();
    let mut events = Vec::new();
    while cands.len() >= params.kappa {
        let best = best_subset(&cands, params);
        if best.len() < params.kappa {
            break;
        }
        let members: Vec<&TweetRecord> = best.iter().map(|&i| cands[i]).collect();
        let event = AttackEvent::from_members(&members);
        debug_assert!(event.satisfies(params), "{event:?}");
        events.push(event);
        let mut taken = best;
        taken.sort_unstable();
        for i in taken.into_iter().rev() {
            cands.swap_remove(i);
        }
    }
    events.sort_by(|a, b| (a.start, &a.tweet_ids).cmp(&(b.start, &b.tweet_ids)));
    events
}
