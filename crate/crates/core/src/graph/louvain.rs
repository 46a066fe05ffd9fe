//! Two-phase Louvain community detection and Newman modularity.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::Graph;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("assignment covers {got} of {expected} nodes")]
    IncompleteAssignment { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LouvainOptions {
    /// Seeds the node visiting order.
    pub seed: u64,
    /// Use edge weights; otherwise every edge counts 1.
    pub weighted: bool,
}

impl Default for LouvainOptions {
    fn default() -> Self {
        Self { seed: 0, weighted: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    /// Community per node, numbered by first appearance in node order.
    pub assignment: Vec<usize>,
    pub n_communities: usize,
    pub modularity: f64,
}

fn edge_weight(w: u64, weighted: bool) -> f64 {
    if weighted {
        w as f64
    } else {
        1.0
    }
}

/// `Q = Σ_c [L_c / m − (d_c / 2m)²]` with `L_c` the weight inside community
/// `c`, `d_c` its total degree and `m` the total weight. Zero without edges.
pub fn modularity(graph: &Graph, assignment: &[usize], weighted: bool) -> Result<f64, GraphError> {
    if assignment.len() != graph.node_count() {
        return Err(GraphError::IncompleteAssignment {
            expected: graph.node_count(),
            got: assignment.len(),
        });
    }
    let n_comm = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0.0; n_comm];
    let mut degree = vec![0.0; n_comm];
    let mut m = 0.0;
    for (a, b, w) in graph.edges() {
        let w = edge_weight(w, weighted);
        m += w;
        degree[assignment[a]] += w;
        degree[assignment[b]] += w;
        if assignment[a] == assignment[b] {
            inside[assignment[a]] += w;
        }
    }
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok((0..n_comm)
        .map(|c| inside[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum())
}

/// Weighted graph allowing self-loops, used between aggregation rounds.
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.adj.len()
    }

    fn degree(&self, i: usize) -> f64 {
        self.adj[i].iter().map(|&(_, w)| w).sum::<f64>() + 2.0 * self.self_loop[i]
    }

    fn total_weight(&self) -> f64 {
        let half: f64 = self.adj.iter().flatten().map(|&(_, w)| w).sum::<f64>() / 2.0;
        half + self.self_loop.iter().sum::<f64>()
    }

    /// Modularity with every node its own community.
    fn modularity(&self, m: f64) -> f64 {
        (0..self.len())
            .map(|i| self.self_loop[i] / m - (self.degree(i) / (2.0 * m)).powi(2))
            .sum()
    }

    /// Local moving phase. Returns the community of every node (renumbered
    /// by first appearance) and whether any node moved.
    fn local_moves(&self, m: f64, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
        let n = self.len();
        let k: Vec<f64> = (0..n).map(|i| self.degree(i)).collect();
        let mut comm: Vec<usize> = (0..n).collect();
        let mut tot = k.clone();
        let mut link = vec![0.0; n];
        let mut touched: Vec<usize> = Vec::new();
        let mut order: Vec<usize> = (0..n).collect();
        let mut any_move = false;
        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &i in &order {
                let own = comm[i];
                for &(j, w) in &self.adj[i] {
                    let c = comm[j];
                    if link[c] == 0.0 {
                        touched.push(c);
                    }
                    link[c] += w;
                }
                tot[own] -= k[i];
                let gain = |c: usize, link: &[f64]| link[c] - tot[c] * k[i] / (2.0 * m);
                let stay = gain(own, &link);
                let mut best = own;
                let mut best_gain = f64::NEG_INFINITY;
                touched.sort_unstable();
                for &c in &touched {
                    if c == own {
                        continue;
                    }
                    let g = gain(c, &link);
                    if g > best_gain + EPS {
                        best = c;
                        best_gain = g;
                    }
                }
                let target = if best != own && best_gain > stay + EPS { best } else { own };
                tot[target] += k[i];
                if target != own {
                    comm[i] = target;
                    moved = true;
                }
                for &c in &touched {
                    link[c] = 0.0;
                }
                touched.clear();
            }
            any_move |= moved;
            if !moved {
                break;
            }
        }
        (renumber(&comm), any_move)
    }

    fn aggregate(&self, comm: &[usize]) -> Level {
        let n_comm = comm.iter().max().map_or(0, |&c| c + 1);
        let mut self_loop = vec![0.0; n_comm];
        let mut maps: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); n_comm];
        for i in 0..self.len() {
            let ci = comm[i];
            self_loop[ci] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                let cj = comm[j];
                if ci == cj {
                    // Seen from both endpoints.
                    self_loop[ci] += w / 2.0;
                } else {
                    *maps[ci].entry(cj).or_default() += w;
                }
            }
        }
        Level {
            adj: maps.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loop,
        }
    }
}

fn renumber(comm: &[usize]) -> Vec<usize> {
    let mut ids = std::collections::HashMap::new();
    comm.iter()
        .map(|&c| {
            let next = ids.len();
            *ids.entry(c).or_insert(next)
        })
        .collect()
}

/// Greedy modularity optimization: local moves to the neighboring community
/// with the best gain (lowest id on ties, moving only on strict improvement),
/// then aggregation, repeated until nothing moves. Deterministic per seed.
pub fn louvain(graph: &Graph, options: &LouvainOptions) -> Result<Partition, GraphError> {
    if graph.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let n = graph.node_count();
    let mut level = Level {
        adj: (0..n)
            .map(|i| {
                graph
                    .neighbors(i)
                    .map(|(j, w)| (j, edge_weight(w, options.weighted)))
                    .collect()
            })
            .collect(),
        self_loop: vec![0.0; n],
    };
    let m = level.total_weight();
    let mut assignment: Vec<usize> = (0..n).collect();
    if m == 0.0 {
        return Ok(Partition {
            n_communities: n,
            assignment,
            modularity: 0.0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    loop {
        let (comm, moved) = level.local_moves(m, &mut rng);
        if !moved {
            break;
        }
        for a in assignment.iter_mut() {
            *a = comm[*a];
        }
        level = level.aggregate(&comm);
    }
    let assignment = renumber(&assignment);
    let q = level.modularity(m);
    let check = modularity(graph, &assignment, options.weighted)?;
    assert!((q - check).abs() < 1e-9, "modularity bookkeeping {q} vs {check}");
    Ok(Partition {
        n_communities: level.len(),
        assignment,
        modularity: check,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_graph;
    use super::super::NodeKey;
    use super::*;
    use proptest::prelude::*;

    fn clique_pair() -> Graph {
        let mut g = Graph::new();
        for i in 0..10 {
            g.add_node(NodeKey::User(i));
        }
        for base in [0, 5] {
            for a in base..base + 5 {
                for b in a + 1..base + 5 {
                    g.add_edge(a, b, 1);
                }
            }
        }
        g.add_edge(4, 5, 1);
        g
    }

    #[test]
    fn recovers_clique_pair() {
        let g = clique_pair();
        for seed in 0..20 {
            let p = louvain(&g, &LouvainOptions { seed, weighted: true }).unwrap();
            assert_eq!(p.n_communities, 2);
            assert_eq!(p.assignment, [0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
            // Each clique: 10 internal edges, degree 21, of m = 21.
            let hand = 2.0 * (10.0 / 21.0 - 0.25);
            assert!((p.modularity - hand).abs() < 1e-12);
            assert!(p.modularity > 0.35);
        }
    }

    #[test]
    fn single_edge() {
        let mut g = Graph::new();
        let a = g.add_node(NodeKey::User(1));
        let b = g.add_node(NodeKey::User(2));
        g.add_edge(a, b, 1);
        let p = louvain(&g, &LouvainOptions::default()).unwrap();
        assert_eq!(p.assignment, [0, 0]);
        assert_eq!(p.modularity, 0.0);
        assert_eq!(modularity(&g, &[0, 1], true).unwrap(), -0.5);
    }

    #[test]
    fn errors_and_edgeless() {
        assert_eq!(louvain(&Graph::new(), &LouvainOptions::default()), Err(GraphError::EmptyGraph));
        let g = clique_pair();
        assert_eq!(
            modularity(&g, &[0; 3], true),
            Err(GraphError::IncompleteAssignment { expected: 10, got: 3 })
        );
        let mut lonely = Graph::new();
        lonely.add_node(NodeKey::User(1));
        lonely.add_node(NodeKey::User(2));
        let p = louvain(&lonely, &LouvainOptions::default()).unwrap();
        assert_eq!((p.n_communities, p.modularity), (2, 0.0));
    }

    #[test]
    fn three_edge_hand_value() {
        // Path 0-1-2-3, weights 1, 2, 1; communities {0,1} {2,3}.
        let mut g = Graph::new();
        for i in 0..4 {
            g.add_node(NodeKey::User(i));
        }
        g.add_edge(0, 1, 1);
        g.add_edge(1, 2, 2);
        g.add_edge(2, 3, 1);
        // m = 4; L = 1, 1; d = 4, 4. Q = 2 (1/4 - 1/4) = 0.
        assert_eq!(modularity(&g, &[0, 0, 1, 1], true).unwrap(), 0.0);
        // Unweighted: m = 3; L = 1, 1; d = 3, 3. Q = 2 (1/3 - 1/4) = 1/6.
        assert!((modularity(&g, &[0, 0, 1, 1], false).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        // Everything together: Q = 1 - 1 = 0.
        assert_eq!(modularity(&g, &[0; 4], true).unwrap(), 0.0);
    }

    /// `Q = 1/2m Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)` over the adjacency
    /// matrix.
    fn matrix_oracle(g: &Graph, assignment: &[usize]) -> f64 {
        let n = g.node_count();
        let mut a = vec![vec![0.0; n]; n];
        for (i, j, w) in g.edges() {
            a[i][j] = w as f64;
            a[j][i] = w as f64;
        }
        let k: Vec<f64> = a.iter().map(|row| row.iter().sum()).collect();
        let two_m: f64 = k.iter().sum();
        if two_m == 0.0 {
            return 0.0;
        }
        let mut q = 0.0;
        for i in 0..n {
            for j in 0..n {
                if assignment[i] == assignment[j] {
                    q += a[i][j] - k[i] * k[j] / two_m;
                }
            }
        }
        q / two_m
    }

    proptest! {
        #[test]
        fn modularity_matches_matrix_oracle(seed in any::<u64>(), p in 0.05f64..0.4, groups in 1usize..6) {
            let g = random_graph(seed, 30, p);
            let assignment: Vec<usize> = (0..30).map(|i| (i * 7 + seed as usize) % groups).collect();
            let q = modularity(&g, &assignment, true).unwrap();
            prop_assert!((q - matrix_oracle(&g, &assignment)).abs() < 1e-9);
            let singles: Vec<usize> = (0..30).collect();
            prop_assert!(modularity(&g, &singles, true).unwrap() <= 1e-12);
        }

        #[test]
        fn louvain_beats_singletons(seed in any::<u64>(), p in 0.05f64..0.4, weighted in any::<bool>()) {
            let g = random_graph(seed, 40, p);
            let opts = LouvainOptions { seed, weighted };
            let part = louvain(&g, &opts).unwrap();
            let singles: Vec<usize> = (0..40).collect();
            prop_assert!(part.modularity >= modularity(&g, &singles, weighted).unwrap() - 1e-12);
            prop_assert!((-0.5..=1.0).contains(&part.modularity));
            if weighted {
                prop_assert!((part.modularity - matrix_oracle(&g, &part.assignment)).abs() < 1e-9);
            }
            prop_assert_eq!(&part, &louvain(&g, &opts).unwrap());
        }
    }
}
