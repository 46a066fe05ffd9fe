//! Account labeling and the search for attacks that never reached the
//! trend list.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use chrono::{Days, NaiveDate};

use super::rules::{classify_trend, DetectorConfig, Verdict};
use crate::classify::ContentClassifier;
use crate::features::{count_features, TweetRecord};
use crate::ingest::{extract_hashtags, Corpus, TrendDay};
use crate::model::{normalize_keyword, TzOffset};

/// Authors of deleted lexicon tweets in attacked trends, counting only
/// tweets deleted on the local day they were posted.
pub fn label_astrobots<'a>(
    trends: impl IntoIterator<Item = (&'a Verdict, &'a [TweetRecord])>,
    tz: TzOffset,
) -> BTreeSet<u64> {
    let mut bots = BTreeSet::new();
    for (verdict, records) in trends {
        if !verdict.attacked {
            continue;
        }
        for r in records {
            let same_day = r
                .deleted_at
                .is_some_and(|d| d >= r.created && d.local_date(tz) == r.created.local_date(tz));
            if r.is_lexicon && same_day {
                bots.insert(r.user);
            }
        }
    }
    bots
}

/// Hashtag-days with at least `min_tweets` tweets whose hashtag trended
/// neither that day nor the next, each with its features and verdict.
/// Positives are unsuccessful attacks. Sorted by date, then keyword.
pub fn scan_candidates(
    corpus: &Corpus,
    known_trends: &HashSet<TrendDay>,
    config: &DetectorConfig,
    classifier: &ContentClassifier,
    tz: TzOffset,
    min_tweets: usize,
) -> Vec<Verdict> {
    let locale = classifier.locale;
    let mut groups: BTreeMap<(NaiveDate, String), Vec<usize>> = BTreeMap::new();
    for (i, t) in corpus.tweets().iter().enumerate() {
        let date = t.created_at.local_date(tz);
        let mut tags = extract_hashtags(&t.text, locale);
        tags.sort();
        tags.dedup();
        for tag in tags {
            groups.entry((date, tag)).or_default().push(i);
        }
    }

    let mut verdicts = Vec::new();
    for ((date, tag), members) in groups {
        if members.len() < min_tweets {
            continue;
        }
        let Ok(keyword) = normalize_keyword(&format!("#{tag}"), locale) else {
            continue;
        };
        let today = TrendDay::new(date, keyword.clone());
        let tomorrow = date
            .checked_add_days(Days::new(1))
            .map(|d| TrendDay::new(d, keyword.clone()));
        if known_trends.contains(&today) || tomorrow.is_some_and(|t| known_trends.contains(&t)) {
            continue;
        }
        let records: Vec<TweetRecord> = members
            .iter()
            .map(|&i| {
                let t = &corpus.tweets()[i];
                let flags = classifier.flags(t, &keyword);
                TweetRecord {
                    id: t.id,
                    user: t.user_id,
                    created: t.created_at,
                    deleted_at: corpus.deletion_for(t).0,
                    is_retweet: t.is_retweet,
                    is_lexicon: flags.is_lexicon,
                    is_single_engagement: flags.is_single_engagement,
                }
            })
            .collect();
        verdicts.push(classify_trend(&today, &count_features(&records), config));
    }
    verdicts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureVector;
    use crate::ingest::{Tweet, TweetEvent};
    use crate::model::{Locale, Timestamp};

    fn rec(id: u64, user: u64, created: i64, deleted: Option<i64>, lex: bool) -> TweetRecord {
        TweetRecord {
            id,
            user,
            created: Timestamp::from_secs(created),
            deleted_at: deleted.map(Timestamp::from_secs),
            is_retweet: false,
            is_lexicon: lex,
            is_single_engagement: true,
        }
    }

    fn verdict(attacked: bool) -> Verdict {
        Verdict {
            date: NaiveDate::from_ymd_opt(2019, 1, 1).unwrap(),
            keyword: "#x".into(),
            attacked,
            fired_rules: vec![],
            features: FeatureVector::default(),
        }
    }

    #[test]
    fn astrobot_fixture() {
        let day = 86_400;
        // Trend A attacked: users 1, 2 bots; user 3 organic (kept); user 4
        // deleted a lexicon tweet the next day.
        let a = vec![
            rec(1, 1, 100, Some(200), true),
            rec(2, 2, 100, Some(300), true),
            rec(3, 3, 100, None, true),
            rec(4, 4, day - 10, Some(day + 10), true),
        ];
        // Trend B attacked: users 2 and 5 bots, 6 deleted non-lexicon.
        let b = vec![
            rec(5, 2, 2 * day, Some(2 * day + 60), true),
            rec(6, 5, 2 * day, Some(2 * day + 60), true),
            rec(7, 6, 2 * day, Some(2 * day + 60), false),
        ];
        // Trend C not attacked: user 7 would qualify otherwise.
        let c = vec![rec(8, 7, 0, Some(60), true)];
        let (va, vb, vc) = (verdict(true), verdict(true), verdict(false));
        let bots = label_astrobots(
            [(&va, a.as_slice()), (&vb, b.as_slice()), (&vc, c.as_slice())],
            TzOffset::UTC,
        );
        assert_eq!(bots.into_iter().collect::<Vec<_>>(), [1, 2, 5]);
    }

    fn at(iso: &str) -> Timestamp {
        Timestamp::parse_iso(iso).unwrap()
    }

    fn attack_events(tag: &str, t0: Timestamp, first_id: u64, n: u64, deleted: bool) -> Vec<TweetEvent> {
        let mut ev = Vec::new();
        for i in 0..n {
            let id = first_id + i;
            let mut t = Tweet::new(id, id, t0 + crate::model::Duration::seconds(i as i64), format!("elma armut kiraz {tag}"));
            t.hashtags = vec![tag.trim_start_matches('#').to_string()];
            ev.push(TweetEvent::Creation(t));
            if deleted {
                ev.push(TweetEvent::Deletion {
                    tweet_id: id,
                    user_id: id,
                    time: t0 + crate::model::Duration::seconds(200),
                });
            }
        }
        ev
    }

    #[test]
    fn scan_flags_only_unsuccessful() {
        let t0 = at("2019-07-01T10:00:00Z");
        let mut ev = attack_events("#kayip", t0, 1, 8, true);
        ev.extend(attack_events("#basarili", t0, 100, 8, true));
        ev.extend(attack_events("#organik", t0, 200, 8, false));
        let corpus = Corpus::from_events(&ev);
        let date = NaiveDate::from_ymd_opt(2019, 7, 2).unwrap();
        let known: HashSet<TrendDay> =
            [TrendDay::new(date, normalize_keyword("#basarili", Locale::Tr).unwrap())].into();
        let classifier = ContentClassifier::new(Locale::Tr);
        let verdicts = scan_candidates(&corpus, &known, &DetectorConfig::default(), &classifier, TzOffset::TURKEY, 4);
        let summary: Vec<(String, bool)> = verdicts.iter().map(|v| (v.keyword.clone(), v.attacked)).collect();
        assert_eq!(summary, [("#kayip".to_string(), true), ("#organik".to_string(), false)]);
    }

    #[test]
    fn scan_respects_minimum() {
        let ev = attack_events("#az", at("2019-07-01T10:00:00Z"), 1, 3, true);
        let corpus = Corpus::from_events(&ev);
        let classifier = ContentClassifier::new(Locale::Tr);
        let v = scan_candidates(&corpus, &HashSet::new(), &DetectorConfig::default(), &classifier, TzOffset::TURKEY, 4);
        assert!(v.is_empty());
    }
}
