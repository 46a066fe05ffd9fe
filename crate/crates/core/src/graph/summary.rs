//! Per-community activity: when its accounts attacked, and which accounts
//! went quiet between attacking and ordinary use.

use std::collections::HashMap;

use serde::Serialize;

use super::{Graph, NodeKey, Partition};
use crate::model::{Duration, Timestamp};

pub const DORMANCY_THRESHOLD: Duration = Duration::days(365);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DormancyGap {
    pub user: u64,
    /// |last undeleted tweet − last attack|.
    pub gap: Duration,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommunitySummary {
    pub community: usize,
    pub n_users: usize,
    pub n_trends: usize,
    /// Earliest and latest attack by any member; absent without attack data.
    pub first_seen: Option<Timestamp>,
    pub last_seen: Option<Timestamp>,
    /// Members with both attack and undeleted activity, by user id.
    pub dormancy_gaps: Vec<DormancyGap>,
}

impl CommunitySummary {
    pub fn dormant(&self) -> usize {
        self.dormancy_gaps.iter().filter(|g| g.flagged).count()
    }
}

/// One summary per community, in community order. Gaps longer than
/// `threshold` are flagged.
pub fn community_summary(
    graph: &Graph,
    partition: &Partition,
    attack_times: &HashMap<u64, Vec<Timestamp>>,
    last_undeleted: &HashMap<u64, Timestamp>,
    threshold: Duration,
) -> Vec<CommunitySummary> {
    let mut out: Vec<CommunitySummary> = (0..partition.n_communities)
        .map(|community| CommunitySummary {
            community,
            n_users: 0,
            n_trends: 0,
            first_seen: None,
            last_seen: None,
            dormancy_gaps: Vec::new(),
        })
        .collect();
    for (node, &c) in partition.assignment.iter().enumerate() {
        let s = &mut out[c];
        let user = match graph.key(node) {
            NodeKey::User(u) => *u,
            NodeKey::Trend(_) => {
                s.n_trends += 1;
                continue;
            }
        };
        s.n_users += 1;
        let times = attack_times.get(&user).map(Vec::as_slice).unwrap_or_default();
        let (lo, hi) = (times.iter().min().copied(), times.iter().max().copied());
        s.first_seen = match (s.first_seen, lo) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        s.last_seen = match (s.last_seen, hi) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        if let (Some(last_attack), Some(&kept)) = (hi, last_undeleted.get(&user)) {
            let gap = (kept - last_attack).abs();
            s.dormancy_gaps.push(DormancyGap {
                user,
                gap,
                flagged: gap > threshold,
            });
        }
    }
    for s in &mut out {
        s.dormancy_gaps.sort_by_key(|g| g.user);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(days: i64) -> Timestamp {
        Timestamp::from_secs(days * 86_400)
    }

    #[test]
    fn fixture() {
        let mut g = Graph::new();
        let u1 = g.add_node(NodeKey::User(1));
        let u2 = g.add_node(NodeKey::User(2));
        let tr = g.add_node(NodeKey::Trend("x".into()));
        g.add_node(NodeKey::User(3));
        g.add_edge(u1, tr, 1);
        g.add_edge(u2, tr, 1);
        let p = Partition {
            assignment: vec![0, 0, 0, 1],
            n_communities: 2,
            modularity: 0.0,
        };
        let attacks: HashMap<u64, Vec<Timestamp>> =
            [(1, vec![t(10), t(20)]), (2, vec![t(5)]), (3, vec![t(7)])].into();
        let kept: HashMap<u64, Timestamp> = [(1, t(390)), (2, t(6))].into();
        let s = community_summary(&g, &p, &attacks, &kept, DORMANCY_THRESHOLD);
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].n_users, s[0].n_trends), (2, 1));
        assert_eq!((s[0].first_seen, s[0].last_seen), (Some(t(5)), Some(t(20))));
        assert_eq!(
            s[0].dormancy_gaps,
            [
                DormancyGap { user: 1, gap: Duration::days(370), flagged: true },
                DormancyGap { user: 2, gap: Duration::days(1), flagged: false },
            ]
        );
        assert_eq!(s[0].dormant(), 1);
        // Single-user community: its own timestamps, no undeleted activity.
        assert_eq!((s[1].first_seen, s[1].last_seen), (Some(t(7)), Some(t(7))));
        assert!(s[1].dormancy_gaps.is_empty());
    }
}
