//! Batched archive reading: lines are parsed in parallel, events are handed
//! on in file order.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use rayon::prelude::*;
use trendguard::classify::{ContentClassifier, LexiconColumn};
use trendguard::ingest::{decompress, parse_stream_bytes, Compression, ParseStats, Parsed};
use trendguard::pipeline::{prepare, BackgroundTally, Candidate, Collector, Group, Grouper};
use trendguard::TweetEvent;

use crate::Result;

const BATCH: usize = 8192;

pub fn for_each_batch(paths: &[PathBuf], mut f: impl FnMut(Vec<TweetEvent>)) -> Result<ParseStats> {
    let mut stats = ParseStats::default();
    let mut lines: Vec<Vec<u8>> = vec![Vec::new(); BATCH];
    for path in paths {
        let ctx = |e: std::io::Error| format!("{}: {e}", path.display());
        let mut file = BufReader::new(File::open(path).map_err(ctx)?);
        let compression = Compression::sniff(file.fill_buf().map_err(ctx)?);
        let mut source = decompress(file, compression);
        loop {
            let mut n = 0;
            while n < BATCH {
                lines[n].clear();
                if source.read_until(b'\n', &mut lines[n]).map_err(ctx)? == 0 {
                    break;
                }
                n += 1;
            }
            if n == 0 {
                break;
            }
            let parsed: Vec<_> = lines[..n].par_iter().map(|l| parse_stream_bytes(l)).collect();
            let mut events = Vec::with_capacity(n);
            for p in parsed {
                stats.record(&p);
                if let Ok(Parsed::Event(ev)) = p {
                    events.push(ev);
                }
            }
            f(events);
            if n < BATCH {
                break;
            }
        }
    }
    Ok(stats)
}

pub struct Collected<K> {
    pub groups: std::collections::BTreeMap<K, Group>,
    pub stats: ParseStats,
    /// Counts for tweets outside every group, when requested.
    pub background: Option<LexiconColumn>,
}

enum Outcome<K> {
    Skip,
    Grouped(Candidate<K>),
    Background(bool),
}

/// Runs both collector passes over `paths`.
pub fn collect<G: Grouper>(
    paths: &[PathBuf],
    grouper: &G,
    classifier: &ContentClassifier,
    with_background: bool,
) -> Result<Collected<G::Key>> {
    let mut collector = Collector::new();
    let mut background = BackgroundTally::new();
    let stats = for_each_batch(paths, |events| {
        let outcomes: Vec<Outcome<G::Key>> = events
            .par_iter()
            .map(|ev| match ev {
                TweetEvent::Creation(t) => match prepare(grouper, classifier, t) {
                    Some(c) => Outcome::Grouped(c),
                    None if with_background => Outcome::Background(classifier.is_lexicon_text(&t.text, None)),
                    None => Outcome::Skip,
                },
                TweetEvent::Deletion { .. } => Outcome::Skip,
            })
            .collect();
        for (ev, o) in events.iter().zip(outcomes) {
            match (ev, o) {
                (_, Outcome::Grouped(c)) => collector.insert(c),
                (TweetEvent::Creation(t), Outcome::Background(lex)) => background.insert(t, lex),
                _ => {}
            }
        }
    })?;
    collector.seal();
    background.seal();
    for_each_batch(paths, |events| {
        for ev in &events {
            match ev {
                TweetEvent::Creation(t) => collector.observe_creation(t),
                TweetEvent::Deletion { tweet_id, time, .. } => {
                    collector.observe_deletion(*tweet_id, *time);
                    if with_background {
                        background.observe_deletion(*tweet_id, *time);
                    }
                }
            }
        }
    })?;
    let background = with_background.then(|| background.column(|id| collector.collected(id)));
    Ok(Collected {
        groups: collector.finish(),
        stats,
        background,
    })
}
