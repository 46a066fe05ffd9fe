//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use trendguard::graph::{Graph, NodeKey};
use trendguard::ingest::write_events;
use trendguard::sim::{generate, LabeledStream, ScenarioConfig, Wordlist};
use trendguard::{Timestamp, TweetRecord};

/// `n` tweets over one hour from `n / 4` accounts, most of them deleted
/// single-engagement tweets with short lifetimes.
pub fn records(n: usize, seed: u64) -> Vec<TweetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users = (n as u64 / 4).max(1);
    (0..n)
        .map(|i| {
            let created = rng.gen_range(0..3600);
            TweetRecord {
                id: i as u64,
                user: rng.gen_range(0..users),
                created: Timestamp::from_secs(created),
                deleted_at: rng.gen_bool(0.7).then(|| Timestamp::from_secs(created + rng.gen_range(0..900))),
                is_retweet: rng.gen_bool(0.2),
                is_lexicon: rng.gen_bool(0.6),
                is_single_engagement: rng.gen_bool(0.8),
            }
        })
        .collect()
}

/// Erdős–Rényi graph with weights in 1..4.
pub fn random_graph(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new();
    for i in 0..n {
        g.add_node(NodeKey::User(i as u64));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(a, b, rng.gen_range(1..4));
            }
        }
    }
    g
}

pub fn default_scenario() -> LabeledStream {
    generate(&ScenarioConfig::default(), &Wordlist::bundled()).expect("default scenario")
}

/// The scenario's archive, one JSON line per element.
pub fn archive_lines(stream: &LabeledStream) -> Vec<Vec<u8>> {
    let mut buf = Vec::new();
    write_events(&mut buf, &stream.events).expect("in-memory write");
    buf.split(|&b| b == b'\n').filter(|l| !l.is_empty()).map(<[u8]>::to_vec).collect()
}
