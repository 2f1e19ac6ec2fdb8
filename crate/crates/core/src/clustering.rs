//! Range-based cluster formation.
//!
//! Every node first acts as a temporary head and collects the nodes strictly
//! inside its transmission range ([`pac_candidates`]). [`expac_cluster`] then
//! greedily turns candidates into disjoint clusters until every node is taken.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cluster, ClusterSet, Node, NodeId, Position};

/// L1 distance between two positions.
pub fn manhattan_distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).abs() + (a.y - b.y).abs()
}

/// A node acting as temporary head together with everything it covers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateCluster {
    pub temp_head: NodeId,
    /// The head plus every node at distance strictly below the range.
    pub covered: BTreeSet<NodeId>,
    /// Neighbours only, i.e. `covered.len() - 1`.
    pub count: usize,
}

fn check_dense(nodes: &[Node]) -> Result<()> {
    if nodes.is_empty() {
        return Err(Error::EmptyInput("node list"));
    }
    if let Some((i, n)) = nodes.iter().enumerate().find(|(i, n)| n.id.index() != *i) {
        return Err(Error::Consistency(format!(
            "node ids must be dense and ordered: position {i} holds node {}",
            n.id
        )));
    }
    Ok(())
}

/// One candidate per node, ordered by node id.
pub fn pac_candidates(nodes: &[Node], tx_range: f64) -> Result<Vec<CandidateCluster>> {
    check_dense(nodes)?;
    if tx_range.is_nan() || tx_range <= 0.0 {
        return Err(Error::Config {
            field: "tx_range",
            reason: "must be positive".into(),
        });
    }
    let candidates = nodes
        .iter()
        .map(|head| {
            let covered: BTreeSet<NodeId> = nodes
                .iter()
                .filter(|n| n.id == head.id || manhattan_distance(head.pos, n.pos) < tx_range)
                .map(|n| n.id)
                .collect();
            CandidateCluster {
                temp_head: head.id,
                count: covered.len() - 1,
                covered,
            }
        })
        .collect();
    Ok(candidates)
}

/// Partitions all nodes with the Ex-PAC greedy loop.
///
/// The first cluster is the candidate with the largest count. After that,
/// among candidates whose own head is still unclustered, the one covering the
/// most unclustered nodes becomes the next cluster, keeping only those
/// unclustered nodes. Ties go to the lower head id. A node whose neighbours
/// were all taken ends up as a singleton through its own candidate.
/// Heads are the temporary (distance-based) heads.
pub fn expac_cluster(nodes: &[Node], tx_range: f64) -> Result<ClusterSet> {
    let candidates = pac_candidates(nodes, tx_range)?;
    let n = nodes.len();
    let mut clustered = vec![false; n];
    let mut remaining = n;
    let mut clusters = Vec::new();

    while remaining > 0 {
        let mut best: Option<(usize, usize)> = None;
        for (idx, cand) in candidates.iter().enumerate() {
            if clustered[cand.temp_head.index()] {
                continue;
            }
            let fresh = cand
                .covered
                .iter()
                .filter(|m| !clustered[m.index()])
                .count();
            if best.is_none_or(|(_, top)| fresh > top) {
                best = Some((idx, fresh));
            }
        }
        // An unclustered node always has its own candidate available.
        let (idx, _) = best.expect("unclustered node without a candidate");
        let cand = &candidates[idx];
        let members: Vec<NodeId> = cand
            .covered
            .iter()
            .copied()
            .filter(|m| !clustered[m.index()])
            .collect();
        for m in &members {
            clustered[m.index()] = true;
        }
        remaining -= members.len();
        let cluster_id = u32::try_from(clusters.len())
            .map_err(|_| Error::Capacity("more than u32::MAX clusters".into()))?;
        clusters.push(Cluster::new(cluster_id, cand.temp_head, members));
    }

    Ok(ClusterSet::new(clusters, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(v: &[usize]) -> BTreeSet<NodeId> {
        v.iter().map(|&i| NodeId(i)).collect()
    }

    fn line(points: &[(f64, f64)]) -> Vec<Node> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Node::new(i, x, y, 500.0))
            .collect()
    }

    #[test]
    fn manhattan_examples() {
        let p = Position::new;
        assert_eq!(manhattan_distance(p(0.0, 0.0), p(0.0, 0.0)), 0.0);
        assert_eq!(manhattan_distance(p(1.0, 2.0), p(4.0, 6.0)), 7.0);
        assert_eq!(manhattan_distance(p(10.0, 20.0), p(5.0, 35.0)), 20.0);
    }

    #[test]
    fn candidates_three_nodes() {
        let nodes = line(&[(0.0, 0.0), (5.0, 0.0), (50.0, 50.0)]);
        let c = pac_candidates(&nodes, 20.0).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[0].covered, ids(&[0, 1]));
        assert_eq!(c[1].covered, ids(&[0, 1]));
        assert_eq!(c[2].covered, ids(&[2]));
        assert_eq!(c.iter().map(|c| c.count).collect::<Vec<_>>(), [1, 1, 0]);
    }

    #[test]
    fn candidate_boundary_is_excluded() {
        let nodes = line(&[(0.0, 0.0), (20.0, 0.0), (10.0, 9.999)]);
        let c = pac_candidates(&nodes, 20.0).unwrap();
        assert_eq!(c[0].covered, ids(&[0, 2]));
    }

    #[test]
    fn single_and_coincident() {
        let one = line(&[(3.0, 4.0)]);
        let c = pac_candidates(&one, 20.0).unwrap();
        assert_eq!(c[0].count, 0);
        assert_eq!(c[0].covered, ids(&[0]));

        let same = line(&[(1.0, 1.0); 5]);
        for cand in pac_candidates(&same, 20.0).unwrap() {
            assert_eq!(cand.count, 4);
        }
        let set = expac_cluster(&same, 20.0).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.clusters[0].members, ids(&[0, 1, 2, 3, 4]));
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(
            pac_candidates(&[], 20.0),
            Err(Error::EmptyInput(_))
        ));
        assert!(matches!(
            expac_cluster(&[], 20.0),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn expac_line_with_outlier() {
        let nodes = line(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (50.0, 50.0)]);
        let set = expac_cluster(&nodes, 20.0).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.clusters[0].cluster_id, 0);
        assert_eq!(set.clusters[0].head, NodeId(0));
        assert_eq!(set.clusters[0].members, ids(&[0, 1, 2]));
        assert_eq!(set.clusters[1].head, NodeId(3));
        assert_eq!(set.clusters[1].members, ids(&[3]));
        set.check_partition().unwrap();
    }

    #[test]
    fn expac_all_out_of_range() {
        let nodes = line(&[(0.0, 0.0), (30.0, 0.0), (60.0, 0.0), (90.0, 0.0)]);
        let set = expac_cluster(&nodes, 20.0).unwrap();
        assert_eq!(set.len(), 4);
        assert!(set.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn expac_skips_candidates_with_clustered_heads() {
        // 1 covers {0,1,2}; 3 covers {2,3,4} but 2 is taken by then.
        let nodes = line(&[
            (0.0, 0.0),
            (15.0, 0.0),
            (30.0, 0.0),
            (45.0, 0.0),
            (60.0, 0.0),
        ]);
        let set = expac_cluster(&nodes, 20.0).unwrap();
        let got: Vec<_> = set.iter().map(|c| (c.head, c.members.clone())).collect();
        assert_eq!(
            got,
            vec![(NodeId(1), ids(&[0, 1, 2])), (NodeId(3), ids(&[3, 4]))]
        );
    }
}
