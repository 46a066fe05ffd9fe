//! Bounded-memory trend collection over archives too large to load.
//!
//! Pass one turns each matching creation into compact rows, one per group
//! (trend day or hashtag day) it belongs to. Pass two attaches deletion
//! notices of collected tweets and drops ids whose earliest copy matched
//! nothing. The result equals the in-memory [`Corpus`](crate::ingest::Corpus)
//! path, except that two copies of one tweet id created at the same instant
//! are ordered by a text hash rather than by text.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::hash::{Hash, Hasher};

use chrono::{Days, NaiveDate};

use crate::classify::{ContentClassifier, LexiconColumn};
use crate::detect::{classify_trend, DetectorConfig, Verdict};
use crate::features::{count_features, TweetRecord};
use crate::ingest::{extract_hashtags, match_keyword, TrendDay, Tweet};
use crate::model::{normalize_keyword, Keyword, KeywordKind, Locale, Timestamp, TzOffset};

/// Assigns tweets to groups, each with the keyword its flags refer to.
pub trait Grouper: Sync {
    type Key: Clone + Eq + Hash + Ord + Send;

    fn for_each_group(&self, tweet: &Tweet, f: &mut dyn FnMut(Self::Key, &Keyword));
}

/// Trend days indexed by the local dates their association windows cover.
#[derive(Debug, Clone)]
pub struct TrendIndex {
    trends: Vec<TrendDay>,
    by_date: HashMap<NaiveDate, Vec<u32>>,
    locale: Locale,
    tz: TzOffset,
}

impl TrendIndex {
    /// `trends` are sorted and deduplicated; keys index the sorted list.
    pub fn new(mut trends: Vec<TrendDay>, locale: Locale, tz: TzOffset) -> Self {
        trends.sort();
        trends.dedup();
        let mut by_date: HashMap<NaiveDate, Vec<u32>> = HashMap::new();
        for (i, t) in trends.iter().enumerate() {
            by_date.entry(t.date).or_default().push(i as u32);
            if let Some(prev) = t.date.checked_sub_days(Days::new(1)) {
                by_date.entry(prev).or_default().push(i as u32);
            }
        }
        Self {
            trends,
            by_date,
            locale,
            tz,
        }
    }

    pub fn trends(&self) -> &[TrendDay] {
        &self.trends
    }
}

impl Grouper for TrendIndex {
    type Key = u32;

    fn for_each_group(&self, tweet: &Tweet, f: &mut dyn FnMut(u32, &Keyword)) {
        let Some(candidates) = self.by_date.get(&tweet.created_at.local_date(self.tz)) else {
            return;
        };
        let mut tags: Option<Vec<String>> = None;
        for &i in candidates {
            let kw = &self.trends[i as usize].keyword;
            let hit = match kw.kind() {
                KeywordKind::Hashtag => tags
                    .get_or_insert_with(|| extract_hashtags(&tweet.text, self.locale))
                    .iter()
                    .any(|t| t == kw.normalized()),
                KeywordKind::Ngram => match_keyword(&tweet.text, kw, self.locale),
            };
            if hit {
                f(i, kw);
            }
        }
    }
}

/// Every hashtag a tweet carries, on the local day it was posted.
#[derive(Debug, Clone, Copy)]
pub struct HashtagDays {
    pub locale: Locale,
    pub tz: TzOffset,
}

impl Grouper for HashtagDays {
    type Key = (NaiveDate, String);

    fn for_each_group(&self, tweet: &Tweet, f: &mut dyn FnMut((NaiveDate, String), &Keyword)) {
        let date = tweet.created_at.local_date(self.tz);
        let mut tags = extract_hashtags(&tweet.text, self.locale);
        tags.sort();
        tags.dedup();
        for tag in tags {
            if let Ok(kw) = normalize_keyword(&format!("#{tag}"), self.locale) {
                f((date, tag), &kw);
            }
        }
    }
}

/// One tweet's share of pass-one work, computed independently per line.
#[derive(Debug, Clone)]
pub struct Candidate<K> {
    id: u64,
    user: u64,
    created: Timestamp,
    text_hash: u64,
    is_retweet: bool,
    groups: Vec<(K, u8)>,
}

const LEXICON: u8 = 1;
const SINGLE: u8 = 2;

fn text_hash(text: &str) -> u64 {
    let mut h = DefaultHasher::new();
    text.hash(&mut h);
    h.finish()
}

/// Matches and classifies one creation. `None` when it joins no group.
pub fn prepare<G: Grouper>(grouper: &G, classifier: &ContentClassifier, tweet: &Tweet) -> Option<Candidate<G::Key>> {
    let mut groups = Vec::new();
    grouper.for_each_group(tweet, &mut |key, kw| {
        let f = classifier.flags(tweet, kw);
        let bits = if f.is_lexicon { LEXICON } else { 0 } | if f.is_single_engagement { SINGLE } else { 0 };
        groups.push((key, bits));
    });
    (!groups.is_empty()).then(|| Candidate {
        id: tweet.id,
        user: tweet.user_id,
        created: tweet.created_at,
        text_hash: text_hash(&tweet.text),
        is_retweet: tweet.is_retweet,
        groups,
    })
}

#[derive(Debug, Clone, Copy)]
struct Row {
    id: u64,
    user: u64,
    created: Timestamp,
    text_hash: u64,
    group: u32,
    flags: u8,
    is_retweet: bool,
}

#[derive(Debug, Clone, Copy, Default)]
struct DeletionSlot {
    earliest: Option<Timestamp>,
    rejected: u32,
    /// A copy seen in pass two that precedes the collected one.
    superseded: bool,
}

/// Collected tweets of one group.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Group {
    /// In `(created, id)` order.
    pub records: Vec<TweetRecord>,
    /// Deletion notices dropped for predating their tweet.
    pub rejected_deletions: usize,
}

/// Two-pass collector. Feed every creation (through [`prepare`]) to
/// [`Collector::insert`], call [`Collector::seal`], then feed every event
/// again to [`Collector::observe_creation`] or
/// [`Collector::observe_deletion`].
#[derive(Debug)]
pub struct Collector<K> {
    keys: Vec<K>,
    intern: HashMap<K, u32>,
    rows: Vec<Row>,
    /// Sorted unique ids with the winning copy's `(created, text hash)`,
    /// aligned with `deletions`.
    ids: Vec<(u64, Timestamp, u64)>,
    deletions: Vec<DeletionSlot>,
    sealed: bool,
}

impl<K: Clone + Eq + Hash + Ord> Default for Collector<K> {
    fn default() -> Self {
        Self {
            keys: Vec::new(),
            intern: HashMap::new(),
            rows: Vec::new(),
            ids: Vec::new(),
            deletions: Vec::new(),
            sealed: false,
        }
    }
}

impl<K: Clone + Eq + Hash + Ord> Collector<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: Candidate<K>) {
        assert!(!self.sealed, "insert after seal");
        for (key, flags) in c.groups {
            let next = self.keys.len() as u32;
            let group = *self.intern.entry(key.clone()).or_insert_with(|| {
                self.keys.push(key);
                next
            });
            self.rows.push(Row {
                id: c.id,
                user: c.user,
                created: c.created,
                text_hash: c.text_hash,
                group,
                flags,
                is_retweet: c.is_retweet,
            });
        }
    }

    /// Resolves repeated creations: per id, only the copy with the smallest
    /// `(created, text hash)` survives, in every group it matched.
    pub fn seal(&mut self) {
        if self.sealed {
            return;
        }
        self.sealed = true;
        self.rows
            .sort_unstable_by_key(|r| (r.id, r.created, r.text_hash, r.group, r.flags, r.is_retweet, r.user));
        let mut kept: Vec<Row> = Vec::with_capacity(self.rows.len());
        for r in self.rows.drain(..) {
            match self.ids.last() {
                Some(&(id, _, _)) if id == r.id => {
                    let w = kept.last().expect("winner kept");
                    if (r.created, r.text_hash) == (w.created, w.text_hash) && r.group != w.group {
                        kept.push(r);
                    }
                }
                _ => {
                    self.ids.push((r.id, r.created, r.text_hash));
                    kept.push(r);
                }
            }
        }
        kept.shrink_to_fit();
        self.rows = kept;
        self.deletions = vec![DeletionSlot::default(); self.ids.len()];
    }

    /// Whether `tweet_id` was collected. Only meaningful after sealing.
    pub fn wants(&self, tweet_id: u64) -> bool {
        self.slot(tweet_id).is_some()
    }

    fn slot(&self, tweet_id: u64) -> Option<usize> {
        self.ids.binary_search_by_key(&tweet_id, |&(id, _, _)| id).ok()
    }

    /// Pass two: any creation, matching or not.
    pub fn observe_creation(&mut self, tweet: &Tweet) {
        assert!(self.sealed, "pass two runs after seal");
        let Some(i) = self.slot(tweet.id) else {
            return;
        };
        let (_, created, hash) = self.ids[i];
        if (tweet.created_at, text_hash(&tweet.text)) < (created, hash) {
            self.deletions[i].superseded = true;
        }
    }

    pub fn observe_deletion(&mut self, tweet_id: u64, time: Timestamp) {
        assert!(self.sealed, "pass two runs after seal");
        let Some(i) = self.slot(tweet_id) else {
            return;
        };
        let slot = &mut self.deletions[i];
        if time < self.ids[i].1 {
            slot.rejected += 1;
        } else {
            slot.earliest = Some(slot.earliest.map_or(time, |e| e.min(time)));
        }
    }

    pub fn n_tweets(&self) -> usize {
        self.ids.len()
    }

    /// Whether `tweet_id` ends up in some group. Complete after pass two.
    pub fn collected(&self, tweet_id: u64) -> bool {
        self.slot(tweet_id).is_some_and(|i| !self.deletions[i].superseded)
    }

    /// Groups by key.
    pub fn finish(mut self) -> BTreeMap<K, Group> {
        self.seal();
        let mut groups: Vec<Group> = vec![Group::default(); self.keys.len()];
        let mut slot = 0usize;
        for r in &self.rows {
            while self.ids[slot].0 != r.id {
                slot += 1;
            }
            let d = self.deletions[slot];
            if d.superseded {
                continue;
            }
            let g = &mut groups[r.group as usize];
            g.rejected_deletions += d.rejected as usize;
            g.records.push(TweetRecord {
                id: r.id,
                user: r.user,
                created: r.created,
                deleted_at: d.earliest,
                is_retweet: r.is_retweet,
                is_lexicon: r.flags & LEXICON != 0,
                is_single_engagement: r.flags & SINGLE != 0,
            });
        }
        self.keys
            .into_iter()
            .zip(groups)
            .map(|(k, mut g)| {
                g.records.sort_unstable_by_key(|r| (r.created, r.id));
                (k, g)
            })
            .collect()
    }
}

/// Lexicon and deletion counts for tweets outside every group, collected
/// alongside a [`Collector`] in the same two passes.
#[derive(Debug, Default)]
pub struct BackgroundTally {
    rows: Vec<(u64, Timestamp, bool)>,
    deleted: Vec<bool>,
    sealed: bool,
}

impl BackgroundTally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Pass one: a creation that joined no group, with its keyword-free
    /// lexicon flag.
    pub fn insert(&mut self, tweet: &Tweet, lexicon: bool) {
        assert!(!self.sealed, "insert after seal");
        self.rows.push((tweet.id, tweet.created_at, lexicon));
    }

    /// Keeps the earliest copy per id.
    pub fn seal(&mut self) {
        if self.sealed {
            return;
        }
        self.sealed = true;
        self.rows.sort_unstable();
        self.rows.dedup_by_key(|r| r.0);
        self.rows.shrink_to_fit();
        self.deleted = vec![false; self.rows.len()];
    }

    pub fn observe_deletion(&mut self, tweet_id: u64, time: Timestamp) {
        assert!(self.sealed, "pass two runs after seal");
        if let Ok(i) = self.rows.binary_search_by_key(&tweet_id, |r| r.0) {
            if time >= self.rows[i].1 {
                self.deleted[i] = true;
            }
        }
    }

    /// Counts over tweets for which `grouped` is false.
    pub fn column(&self, grouped: impl Fn(u64) -> bool) -> LexiconColumn {
        let mut col = LexiconColumn::default();
        for (r, &d) in self.rows.iter().zip(&self.deleted) {
            if !grouped(r.0) {
                col.add(d, r.2);
            }
        }
        col
    }
}

/// Trend column of the lexicon table: each tweet counted once, with the
/// flags of the first group (in key order) holding it.
pub fn grouped_column<K>(groups: &BTreeMap<K, Group>) -> LexiconColumn {
    let mut col = LexiconColumn::default();
    let mut seen = HashSet::new();
    for g in groups.values() {
        for r in &g.records {
            if seen.insert(r.id) {
                col.add(r.is_deleted(), r.is_lexicon);
            }
        }
    }
    col
}

/// Verdicts for hashtag days with at least `min_tweets` tweets that trended
/// neither that day nor the next, sorted by date and keyword.
pub fn hashtag_day_verdicts(
    groups: &BTreeMap<(NaiveDate, String), Group>,
    known_trends: &HashSet<TrendDay>,
    config: &DetectorConfig,
    locale: Locale,
    min_tweets: usize,
) -> Vec<(TrendDay, Verdict)> {
    let mut out = Vec::new();
    for ((date, tag), g) in groups {
        if g.records.len() < min_tweets {
            continue;
        }
        let Ok(keyword) = normalize_keyword(&format!("#{tag}"), locale) else {
            continue;
        };
        let today = TrendDay::new(*date, keyword.clone());
        let tomorrow = date
            .checked_add_days(Days::new(1))
            .map(|d| TrendDay::new(d, keyword));
        if known_trends.contains(&today) || tomorrow.is_some_and(|t| known_trends.contains(&t)) {
            continue;
        }
        let v = classify_trend(&today, &count_features(&g.records), config);
        out.push((today, v));
    }
    out
}
