//! Joining tweets and deletion notices to trend days.

use std::collections::{BTreeMap, HashMap, HashSet};

use chrono::Days;

use super::matching::match_keyword;
use super::stream::{Tweet, TweetEvent};
use super::trends::TrendDay;
use crate::model::{Locale, Timestamp, TzOffset};

/// A trend day together with the tweets associated with it.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendInstance {
    pub trend: TrendDay,
    /// Sorted by `(created_at, id)`.
    pub tweets: Vec<Tweet>,
    /// Earliest valid deletion time per tweet id.
    pub deletions: BTreeMap<u64, Timestamp>,
    /// Deletion notices that predate their tweet's creation; not stored.
    pub rejected_deletions: usize,
}

impl TrendInstance {
    pub fn deletion_of(&self, tweet_id: u64) -> Option<Timestamp> {
        self.deletions.get(&tweet_id).copied()
    }

    pub fn is_deleted(&self, tweet_id: u64) -> bool {
        self.deletions.contains_key(&tweet_id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnmatchedDeletion {
    pub tweet_id: u64,
    pub user_id: u64,
    pub time: Timestamp,
}

/// In-memory event collection with set semantics: duplicate creations
/// collapse, the order in which events were added never matters.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    tweets: Vec<Tweet>,
    notices: HashMap<u64, Vec<(u64, Timestamp)>>,
}

impl Corpus {
    pub fn from_events<'a>(events: impl IntoIterator<Item = &'a TweetEvent>) -> Self {
        let mut by_id: HashMap<u64, Tweet> = HashMap::new();
        let mut notices: HashMap<u64, Vec<(u64, Timestamp)>> = HashMap::new();
        for ev in events {
            match ev {
                TweetEvent::Creation(t) => match by_id.get(&t.id) {
                    Some(prev) if (prev.created_at, &prev.text) <= (t.created_at, &t.text) => {}
                    _ => {
                        by_id.insert(t.id, t.clone());
                    }
                },
                TweetEvent::Deletion {
                    tweet_id,
                    user_id,
                    time,
                } => notices.entry(*tweet_id).or_default().push((*user_id, *time)),
            }
        }
        let mut tweets: Vec<Tweet> = by_id.into_values().collect();
        tweets.sort_by_key(|t| (t.created_at, t.id));
        for list in notices.values_mut() {
            list.sort_unstable();
        }
        Self { tweets, notices }
    }

    /// Tweets sorted by `(created_at, id)`.
    pub fn tweets(&self) -> &[Tweet] {
        &self.tweets
    }

    /// Earliest deletion notice not preceding the creation, plus the number
    /// of notices rejected for predating it.
    pub fn deletion_for(&self, tweet: &Tweet) -> (Option<Timestamp>, usize) {
        let Some(list) = self.notices.get(&tweet.id) else {
            return (None, 0);
        };
        let rejected = list.iter().filter(|(_, t)| *t < tweet.created_at).count();
        let valid = list
            .iter()
            .map(|(_, t)| *t)
            .filter(|t| *t >= tweet.created_at)
            .min();
        (valid, rejected)
    }

    /// Delete notices whose tweet never appears in the corpus, sorted by id.
    pub fn unmatched_deletions(&self) -> Vec<UnmatchedDeletion> {
        let known: HashSet<u64> = self.tweets.iter().map(|t| t.id).collect();
        let mut out: Vec<UnmatchedDeletion> = self
            .notices
            .iter()
            .filter(|(id, _)| !known.contains(id))
            .flat_map(|(&tweet_id, list)| {
                list.iter().map(move |&(user_id, time)| UnmatchedDeletion {
                    tweet_id,
                    user_id,
                    time,
                })
            })
            .collect();
        out.sort_by_key(|d| (d.tweet_id, d.time, d.user_id));
        out
    }

    /// Tweets created in `[start, end)`.
    pub fn tweets_between(&self, start: Timestamp, end: Timestamp) -> &[Tweet] {
        let lo = self.tweets.partition_point(|t| t.created_at < start);
        let hi = self.tweets.partition_point(|t| t.created_at < end);
        &self.tweets[lo..hi]
    }

    /// See [`build_trend_instance`].
    pub fn instance(&self, trend: &TrendDay, locale: Locale, tz: TzOffset) -> TrendInstance {
        let (start, end) = association_window(trend, tz);
        let mut tweets = Vec::new();
        let mut deletions = BTreeMap::new();
        let mut rejected_deletions = 0;
        for t in self.tweets_between(start, end) {
            if !match_keyword(&t.text, &trend.keyword, locale) {
                continue;
            }
            let (deleted, rejected) = self.deletion_for(t);
            rejected_deletions += rejected;
            if let Some(d) = deleted {
                deletions.insert(t.id, d);
            }
            tweets.push(t.clone());
        }
        TrendInstance {
            trend: trend.clone(),
            tweets,
            deletions,
            rejected_deletions,
        }
    }
}

/// Local-time window `[day before 00:00, trend day 24:00)` of a trend day.
pub fn association_window(trend: &TrendDay, tz: TzOffset) -> (Timestamp, Timestamp) {
    let prev = trend.date.checked_sub_days(Days::new(1)).unwrap_or(trend.date);
    let next = trend.date.checked_add_days(Days::new(1)).unwrap_or(trend.date);
    (tz.midnight(prev), tz.midnight(next))
}

/// Collects the tweets mentioning the trend keyword that were posted on the
/// trend day or the day before (local time), attaching each tweet's
/// deletion time wherever its notice occurs in `events`.
pub fn build_trend_instance<'a>(
    trend: &TrendDay,
    events: impl IntoIterator<Item = &'a TweetEvent>,
    locale: Locale,
    tz: TzOffset,
) -> TrendInstance {
    Corpus::from_events(events).instance(trend, locale, tz)
}
