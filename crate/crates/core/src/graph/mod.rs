//! User–trend networks: construction, core filtering, community detection
//! and export.

mod louvain;
mod summary;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::features::TweetRecord;
use crate::ingest::TrendDay;

pub use louvain::{louvain, modularity, GraphError, LouvainOptions, Partition};
pub use summary::{community_summary, CommunitySummary, DormancyGap, DORMANCY_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    User,
    Trend,
}

impl NodeKind {
    pub fn name(self) -> &'static str {
        match self {
            NodeKind::User => "user",
            NodeKind::Trend => "trend",
        }
    }
}

/// Users sort before trends.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKey {
    User(u64),
    /// A trend-day label, see [`TrendDay::label`].
    Trend(String),
}

impl NodeKey {
    pub fn kind(&self) -> NodeKind {
        match self {
            NodeKey::User(_) => NodeKind::User,
            NodeKey::Trend(_) => NodeKind::Trend,
        }
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeKey::User(id) => write!(f, "{id}"),
            NodeKey::Trend(label) => f.write_str(label),
        }
    }
}

/// Undirected graph with positive integer edge weights and no self-loops.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Graph {
    keys: Vec<NodeKey>,
    index: HashMap<NodeKey, usize>,
    adj: Vec<BTreeMap<usize, u64>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, key: NodeKey) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.index.insert(key.clone(), i);
        self.keys.push(key);
        self.adj.push(BTreeMap::new());
        i
    }

    /// Adds `weight` to the edge between `a` and `b`.
    pub fn add_edge(&mut self, a: usize, b: usize, weight: u64) {
        assert_ne!(a, b, "self-loop");
        assert!(weight >= 1, "zero weight");
        *self.adj[a].entry(b).or_default() += weight;
        *self.adj[b].entry(a).or_default() += weight;
    }

    pub fn node_count(&self) -> usize {
        self.keys.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, node: usize) -> &NodeKey {
        &self.keys[node]
    }

    pub fn keys(&self) -> &[NodeKey] {
        &self.keys
    }

    pub fn find(&self, key: &NodeKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Number of distinct neighbors.
    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    pub fn weighted_degree(&self, node: usize) -> u64 {
        self.adj[node].values().sum()
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.adj[node].iter().map(|(&n, &w)| (n, w))
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        self.adj[a].get(&b).copied()
    }

    /// Each edge once, as `(a, b, weight)` with `a < b`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, m)| m.range(a + 1..).map(move |(&b, &w)| (a, b, w)))
    }

    pub fn total_weight(&self) -> u64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Every edge joins a user and a trend.
    pub fn is_bipartite(&self) -> bool {
        self.edges()
            .all(|(a, b, _)| self.keys[a].kind() != self.keys[b].kind())
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.keys.iter().filter(|k| k.kind() == kind).count()
    }

    /// Subgraph on the nodes with `keep[i]`, preserving node order.
    pub fn induced(&self, keep: &[bool]) -> Graph {
        let mut g = Graph::new();
        let mut map = vec![usize::MAX; self.node_count()];
        for (i, key) in self.keys.iter().enumerate() {
            if keep[i] {
                map[i] = g.add_node(key.clone());
            }
        }
        for (a, b, w) in self.edges() {
            if keep[a] && keep[b] {
                g.add_edge(map[a], map[b], w);
            }
        }
        g
    }
}

/// Which tweets produce an edge between their author and their trend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePredicate {
    Undeleted,
    DeletedLexicon,
}

impl EdgePredicate {
    pub fn admits(self, r: &TweetRecord) -> bool {
        match self {
            EdgePredicate::Undeleted => !r.is_deleted(),
            EdgePredicate::DeletedLexicon => r.is_deleted() && r.is_lexicon,
        }
    }
}

/// One edge per (user, trend day) with at least one admitted tweet, weighted
/// by the number of such tweets. The result does not depend on input order.
pub fn build_graph<'a>(
    trends: impl IntoIterator<Item = (&'a TrendDay, &'a [TweetRecord])>,
    predicate: EdgePredicate,
) -> Graph {
    let mut edges: BTreeMap<(u64, String), u64> = BTreeMap::new();
    for (trend, records) in trends {
        let label = trend.label();
        for r in records.iter().filter(|r| predicate.admits(r)) {
            *edges.entry((r.user, label.clone())).or_default() += 1;
        }
    }
    let mut nodes: BTreeSet<NodeKey> = BTreeSet::new();
    for (user, label) in edges.keys() {
        nodes.insert(NodeKey::User(*user));
        nodes.insert(NodeKey::Trend(label.clone()));
    }
    let mut g = Graph::new();
    for key in nodes {
        g.add_node(key);
    }
    for ((user, label), w) in edges {
        let a = g.find(&NodeKey::User(user)).expect("inserted");
        let b = g.find(&NodeKey::Trend(label)).expect("inserted");
        g.add_edge(a, b, w);
    }
    g
}

/// Maximal subgraph whose nodes all have at least `k` distinct neighbors.
pub fn k_core(graph: &Graph, k: usize) -> Graph {
    let n = graph.node_count();
    let mut degree: Vec<usize> = (0..n).map(|i| graph.degree(i)).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| degree[i] < k).collect();
    for &i in &queue {
        alive[i] = false;
    }
    while let Some(i) = queue.pop_front() {
        for (j, _) in graph.neighbors(i) {
            if alive[j] {
                degree[j] -= 1;
                if degree[j] < k {
                    alive[j] = false;
                    queue.push_back(j);
                }
            }
        }
    }
    graph.induced(&alive)
}

/// Drops users linked to a single trend, then trends left without users.
pub fn single_attack_filter(graph: &Graph) -> Graph {
    let n = graph.node_count();
    let keep_user: Vec<bool> = (0..n)
        .map(|i| graph.key(i).kind() != NodeKind::User || graph.degree(i) >= 2)
        .collect();
    let keep: Vec<bool> = (0..n)
        .map(|i| match graph.key(i).kind() {
            NodeKind::User => keep_user[i],
            NodeKind::Trend => graph.neighbors(i).any(|(j, _)| keep_user[j]),
        })
        .collect();
    graph.induced(&keep)
}

/// User nodes present in both graphs.
pub fn user_overlap(a: &Graph, b: &Graph) -> usize {
    a.keys()
        .iter()
        .filter(|k| k.kind() == NodeKind::User && b.find(k).is_some())
        .count()
}

pub fn write_edges_csv<W: Write>(out: W, graph: &Graph) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["source", "target", "weight", "source_kind", "target_kind"])?;
    for (a, b, weight) in graph.edges() {
        let (ka, kb) = (graph.key(a), graph.key(b));
        w.write_record([
            ka.to_string(),
            kb.to_string(),
            weight.to_string(),
            ka.kind().name().to_string(),
            kb.kind().name().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_partition_csv<W: Write>(out: W, graph: &Graph, partition: &Partition) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "community"])?;
    for (i, c) in partition.assignment.iter().enumerate() {
        w.write_record([graph.key(i).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{normalize_keyword, Locale, Timestamp};
    use proptest::prelude::*;
    use rand::{seq::SliceRandom, Rng, SeedableRng};

    fn trend(day: u32, k: &str) -> TrendDay {
        TrendDay::new(
            chrono::NaiveDate::from_ymd_opt(2019, 7, day).unwrap(),
            normalize_keyword(k, Locale::Tr).unwrap(),
        )
    }

    fn rec(id: u64, user: u64, deleted: bool, lex: bool) -> TweetRecord {
        TweetRecord {
            id,
            user,
            created: Timestamp::from_secs(0),
            deleted_at: deleted.then(|| Timestamp::from_secs(10)),
            is_retweet: false,
            is_lexicon: lex,
            is_single_engagement: true,
        }
    }

    #[test]
    fn two_tweets_one_edge() {
        let t = trend(1, "#a");
        let r = [rec(1, 7, false, false), rec(2, 7, false, false)];
        let g = build_graph([(&t, &r[..])], EdgePredicate::Undeleted);
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1, 2)]);
        assert!(g.is_bipartite());
        let g = build_graph([(&t, &r[..])], EdgePredicate::DeletedLexicon);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn three_user_fixture() {
        let (a, b) = (trend(1, "#a"), trend(2, "#b"));
        let ra = [rec(1, 1, true, true), rec(2, 2, true, true), rec(3, 3, false, true)];
        let rb = [rec(4, 2, true, true), rec(5, 2, true, true), rec(6, 3, true, false)];
        let g = build_graph([(&a, &ra[..]), (&b, &rb[..])], EdgePredicate::DeletedLexicon);
        let id = |k: NodeKey| g.find(&k).unwrap();
        let (ta, tb) = (id(NodeKey::Trend(a.label())), id(NodeKey::Trend(b.label())));
        assert_eq!(g.node_count(), 4);
        assert_eq!(g.weight(id(NodeKey::User(1)), ta), Some(1));
        assert_eq!(g.weight(id(NodeKey::User(2)), ta), Some(1));
        assert_eq!(g.weight(id(NodeKey::User(2)), tb), Some(2));
        assert_eq!(g.find(&NodeKey::User(3)), None);
    }

    fn clique(n: usize, extra: &[(usize, usize)]) -> Graph {
        let mut g = Graph::new();
        for i in 0..n {
            g.add_node(NodeKey::User(i as u64));
        }
        for a in 0..n {
            for b in a + 1..n {
                g.add_edge(a, b, 1);
            }
        }
        for &(a, b) in extra {
            let b = g.add_node(NodeKey::User(b as u64));
            g.add_edge(a, b, 1);
        }
        g
    }

    #[test]
    fn kcore_examples() {
        let mut star = Graph::new();
        let hub = star.add_node(NodeKey::Trend("hub".into()));
        for i in 0..6 {
            let u = star.add_node(NodeKey::User(i));
            star.add_edge(hub, u, 1);
        }
        assert!(k_core(&star, 2).is_empty());
        let g = clique(4, &[(0, 9)]);
        let core = k_core(&g, 3);
        assert_eq!(core.node_count(), 4);
        assert_eq!(core.find(&NodeKey::User(9)), None);
    }

    #[test]
    fn single_attack_filter_fixture() {
        let mut g = Graph::new();
        let t1 = g.add_node(NodeKey::Trend("t1".into()));
        let t2 = g.add_node(NodeKey::Trend("t2".into()));
        let t3 = g.add_node(NodeKey::Trend("t3".into()));
        let once = g.add_node(NodeKey::User(1));
        let twice = g.add_node(NodeKey::User(2));
        g.add_edge(once, t3, 5);
        g.add_edge(twice, t1, 1);
        g.add_edge(twice, t2, 1);
        let f = single_attack_filter(&g);
        let keys: Vec<String> = f.keys().iter().map(ToString::to_string).collect();
        assert_eq!(keys, ["t1", "t2", "2"]);
        assert_eq!(f.edge_count(), 2);
    }

    #[test]
    fn exports() {
        let t = trend(1, "#a");
        let r = [rec(1, 7, false, false)];
        let g = build_graph([(&t, &r[..])], EdgePredicate::Undeleted);
        let mut out = Vec::new();
        write_edges_csv(&mut out, &g).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "source,target,weight,source_kind,target_kind\n7,2019-07-01/#a,1,user,trend\n"
        );
        let p = louvain(&g, &LouvainOptions::default()).unwrap();
        let mut out = Vec::new();
        write_partition_csv(&mut out, &g, &p).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "node,community\n7,0\n2019-07-01/#a,0\n");
    }

    #[test]
    fn overlap() {
        let t = trend(1, "#a");
        let r1 = [rec(1, 1, false, false), rec(2, 2, true, true)];
        let kept = build_graph([(&t, &r1[..])], EdgePredicate::Undeleted);
        let bots = build_graph([(&t, &r1[..])], EdgePredicate::DeletedLexicon);
        assert_eq!(user_overlap(&kept, &bots), 0);
        assert_eq!(user_overlap(&kept, &kept), 1);
    }

    /// Repeats "drop every node under degree k" until nothing changes.
    fn peel_oracle(g: &Graph, k: usize) -> BTreeSet<NodeKey> {
        let mut alive: BTreeSet<usize> = (0..g.node_count()).collect();
        loop {
            let low: Vec<usize> = alive
                .iter()
                .copied()
                .filter(|&i| g.neighbors(i).filter(|(j, _)| alive.contains(j)).count() < k)
                .collect();
            if low.is_empty() {
                break;
            }
            for i in low {
                alive.remove(&i);
            }
        }
        alive.into_iter().map(|i| g.key(i).clone()).collect()
    }

    pub(super) fn random_graph(seed: u64, n: usize, p: f64) -> Graph {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
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

    proptest! {
        #[test]
        fn kcore_matches_peel_oracle(seed in any::<u64>(), k in 1usize..7, p in 0.02f64..0.3) {
            let g = random_graph(seed, 50, p);
            let core = k_core(&g, k);
            let got: BTreeSet<NodeKey> = core.keys().iter().cloned().collect();
            prop_assert_eq!(&got, &peel_oracle(&g, k));
            for i in 0..core.node_count() {
                prop_assert!(core.degree(i) >= k);
            }
        }

        #[test]
        fn kcore_is_maximal(seed in any::<u64>(), k in 1usize..5) {
            let g = random_graph(seed, 14, 0.3);
            let core = k_core(&g, k);
            for i in 0..g.node_count() {
                if core.find(g.key(i)).is_some() {
                    continue;
                }
                let mut keep: Vec<bool> = (0..g.node_count()).map(|j| core.find(g.key(j)).is_some()).collect();
                keep[i] = true;
                let grown = g.induced(&keep);
                prop_assert!((0..grown.node_count()).any(|j| grown.degree(j) < k));
            }
        }

        #[test]
        fn build_is_order_independent(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let trends: Vec<TrendDay> = (1..6).map(|d| trend(d, &format!("#t{d}"))).collect();
            let recs: Vec<Vec<TweetRecord>> = trends.iter().map(|_| {
                (0..rng.gen_range(0..15)).map(|i| rec(i, rng.gen_range(0..8), rng.gen_bool(0.5), rng.gen_bool(0.5))).collect()
            }).collect();
            let mut pairs: Vec<(&TrendDay, &[TweetRecord])> = trends.iter().zip(recs.iter().map(Vec::as_slice)).collect();
            let a = build_graph(pairs.iter().copied(), EdgePredicate::Undeleted);
            pairs.shuffle(&mut rng);
            let b = build_graph(pairs.iter().copied(), EdgePredicate::Undeleted);
            prop_assert_eq!(a, b);
        }
    }
}
