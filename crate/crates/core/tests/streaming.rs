//! The two-pass collector against the in-memory corpus path.

use std::collections::{BTreeMap, HashSet};

use chrono::NaiveDate;
use proptest::prelude::*;
use trendguard::classify::lexicon_stats;
use trendguard::detect::scan_candidates;
use trendguard::features::classify_instance;
use trendguard::pipeline::{grouped_column, BackgroundTally, hashtag_day_verdicts, prepare, Collector, Grouper, HashtagDays, TrendIndex};
use trendguard::{ContentClassifier, Corpus, DetectorConfig, Locale, Timestamp, TrendDay, Tweet, TweetEvent, TzOffset};

const TEXTS: [&str; 8] = [
    "#a",
    "ali veli #a",
    "#A #b",
    "Hello there #b!",
    "kedi köpek",
    "#c kuş",
    "x y z #a #c",
    "ali veli",
];

fn base() -> i64 {
    TzOffset::TURKEY.midnight(NaiveDate::from_ymd_opt(2019, 7, 10).unwrap()).secs()
}

fn event() -> impl Strategy<Value = TweetEvent> {
    let create = (0u64..30, 0i64..3 * 86_400, 0usize..TEXTS.len(), any::<bool>()).prop_map(|(id, t, k, rt)| {
        let mut tw = Tweet::new(id, id % 7, Timestamp::from_secs(base() - 86_400 + t), TEXTS[k]);
        tw.is_retweet = rt;
        TweetEvent::Creation(tw)
    });
    let delete = (0u64..30, 0i64..3 * 86_400).prop_map(|(id, t)| TweetEvent::Deletion {
        tweet_id: id,
        user_id: id % 7,
        time: Timestamp::from_secs(base() - 86_400 + t),
    });
    prop_oneof![3 => create, 1 => delete]
}

fn collect<G: Grouper>(g: &G, clf: &ContentClassifier, events: &[TweetEvent]) -> BTreeMap<G::Key, trendguard::pipeline::Group> {
    let mut c = Collector::new();
    for ev in events {
        if let TweetEvent::Creation(t) = ev {
            if let Some(cand) = prepare(g, clf, t) {
                c.insert(cand);
            }
        }
    }
    c.seal();
    for ev in events {
        match ev {
            TweetEvent::Creation(t) => c.observe_creation(t),
            TweetEvent::Deletion { tweet_id, time, .. } => c.observe_deletion(*tweet_id, *time),
        }
    }
    c.finish()
}

fn trends() -> Vec<TrendDay> {
    let d = NaiveDate::from_ymd_opt(2019, 7, 10).unwrap();
    ["#a", "#b", "ali veli"]
        .iter()
        .map(|k| TrendDay::new(d, trendguard::normalize_keyword(k, Locale::Tr).unwrap()))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn trend_groups_match_corpus(events in prop::collection::vec(event(), 0..60)) {
        let clf = ContentClassifier::new(Locale::Tr);
        let tz = TzOffset::TURKEY;
        // Distinct texts per id and second keep the text-hash tie-break out of play.
        let mut seen = HashSet::new();
        let events: Vec<TweetEvent> = events
            .into_iter()
            .filter(|e| match e {
                TweetEvent::Creation(t) => seen.insert((t.id, t.created_at)),
                _ => true,
            })
            .collect();
        let idx = TrendIndex::new(trends(), Locale::Tr, tz);
        let groups = collect(&idx, &clf, &events);
        let corpus = Corpus::from_events(&events);
        for (i, trend) in idx.trends().iter().enumerate() {
            let inst = corpus.instance(trend, Locale::Tr, tz);
            let expected = classify_instance(&clf, &inst);
            let got = groups.get(&(i as u32)).cloned().unwrap_or_default();
            prop_assert_eq!(&got.records, &expected);
            prop_assert_eq!(got.rejected_deletions, inst.rejected_deletions);
        }

        let mut bg = BackgroundTally::new();
        let mut c = Collector::new();
        for ev in &events {
            if let TweetEvent::Creation(t) = ev {
                match prepare(&idx, &clf, t) {
                    Some(cand) => c.insert(cand),
                    None => bg.insert(t, clf.is_lexicon_text(&t.text, None)),
                }
            }
        }
        c.seal();
        bg.seal();
        for ev in &events {
            match ev {
                TweetEvent::Creation(t) => c.observe_creation(t),
                TweetEvent::Deletion { tweet_id, time, .. } => {
                    c.observe_deletion(*tweet_id, *time);
                    bg.observe_deletion(*tweet_id, *time);
                }
            }
        }
        let other = bg.column(|id| c.collected(id));
        let trend_col = grouped_column(&c.finish());
        let instances: Vec<_> = idx.trends().iter().map(|t| corpus.instance(t, Locale::Tr, tz)).collect();
        let in_trends: HashSet<u64> = instances.iter().flat_map(|i| i.tweets.iter().map(|t| t.id)).collect();
        let background: Vec<(Tweet, bool)> = corpus
            .tweets()
            .iter()
            .filter(|t| !in_trends.contains(&t.id))
            .map(|t| (t.clone(), corpus.deletion_for(t).0.is_some()))
            .collect();
        if let Ok(table) = lexicon_stats(&clf, &instances, &background) {
            prop_assert_eq!(table.trends, trend_col);
            prop_assert_eq!(table.other, other);
        }

        let known: HashSet<TrendDay> = trends().into_iter().take(1).collect();
        let cfg = DetectorConfig::default();
        let expected = scan_candidates(&corpus, &known, &cfg, &clf, tz, 2);
        let hd = collect(&HashtagDays { locale: Locale::Tr, tz }, &clf, &events);
        let got: Vec<_> = hashtag_day_verdicts(&hd, &known, &cfg, Locale::Tr, 2).into_iter().map(|(_, v)| v).collect();
        prop_assert_eq!(got, expected);
    }
}
