//! Worked examples whose expected values come from the brute-force oracles.
//! Each test checks the oracle against the frozen value first, then the library.

mod oracles;

use clusterbench::{
    cluster_diameter, dunn_index, expac_cluster, pac_candidates, simulate_nodes, Cluster,
    ClusterSet, Node, NodeId, Position, ScenarioConfig,
};

fn nodes(points: &[(f64, f64)]) -> Vec<Node> {
    points
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Node::new(i, x, y, 500.0))
        .collect()
}

fn labelled(points: &[(f64, f64)], labels: &[usize]) -> (ClusterSet, Vec<Position>) {
    let k = labels.iter().max().unwrap() + 1;
    let clusters = (0..k)
        .map(|c| {
            let members: Vec<NodeId> = (0..labels.len())
                .filter(|&i| labels[i] == c)
                .map(NodeId)
                .collect();
            Cluster::new(c as u32, members[0], members)
        })
        .collect();
    let pos = points.iter().map(|&(x, y)| Position::new(x, y)).collect();
    (ClusterSet::new(clusters, points.len()), pos)
}

#[test]
fn three_node_candidates() {
    let pts = [(0.0, 0.0), (5.0, 0.0), (50.0, 50.0)];
    // Distance matrix: d01 = 5, d02 = 100, d12 = 95.
    assert_eq!(oracles::l1(pts[0], pts[1]), 5.0);
    assert_eq!(oracles::l1(pts[0], pts[2]), 100.0);
    assert_eq!(oracles::l1(pts[1], pts[2]), 95.0);
    let covered: Vec<Vec<usize>> = pac_candidates(&nodes(&pts), 20.0)
        .unwrap()
        .into_iter()
        .map(|c| c.covered.into_iter().map(|n| n.0).collect())
        .collect();
    assert_eq!(covered, vec![vec![0, 1], vec![0, 1], vec![2]]);
}

#[test]
fn expac_line_and_outlier() {
    let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (50.0, 50.0)];
    let frozen = vec![(0, vec![0, 1, 2]), (3, vec![3])];
    assert_eq!(oracles::expac_literal(&pts, 20.0), frozen);
    let set = expac_cluster(&nodes(&pts), 20.0).unwrap();
    let got: Vec<(usize, Vec<usize>)> = set
        .iter()
        .map(|c| (c.head.0, c.members.iter().map(|m| m.0).collect()))
        .collect();
    assert_eq!(got, frozen);
}

#[test]
fn inter_cluster_and_dunn_examples() {
    let pts = [(0.0, 0.0), (10.0, 0.0), (13.0, 0.0), (20.0, 0.0)];
    let labels = [0, 0, 1, 1];
    // Cross pairs: 13, 20, 3, 10 -> 3. Diameters 10 and 7 -> 10.
    assert_eq!(oracles::dunn_brute_force(&pts, &labels), Some(0.3));
    let (set, pos) = labelled(&pts, &labels);
    assert_eq!(dunn_index(&set, &pos).unwrap(), 0.3);

    let pts = [(0.0, 0.0), (4.0, 0.0), (10.0, 0.0), (14.0, 0.0)];
    assert_eq!(oracles::dunn_brute_force(&pts, &labels), Some(1.5));
    let (set, pos) = labelled(&pts, &labels);
    assert_eq!(dunn_index(&set, &pos).unwrap(), 1.5);
}

#[test]
fn diameter_of_three_points() {
    let pts = [(0.0, 0.0), (4.0, 0.0), (1.0, 1.0)];
    let brute = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| oracles::l1(pts[i], pts[j]))
        .fold(0.0, f64::max);
    assert_eq!(brute, 4.0);
    let (set, pos) = labelled(&pts, &[0, 0, 0]);
    assert_eq!(cluster_diameter(&set.clusters[0], &pos).unwrap(), 4.0);
}

#[test]
fn trace_length_is_three_per_member() {
    for k in 0..6usize {
        let set = ClusterSet::new(vec![Cluster::new(0, NodeId(0), (0..=k).map(NodeId))], k + 1);
        let (_, trace) =
            clusterbench::assign_addresses(&set, clusterbench::AddressPrefix::default()).unwrap();
        assert_eq!(trace.len(), 3 * k);
    }
}

#[test]
fn crossover_tick_solves_the_drain_inequality() {
    // Smallest integer t with 590 - 50t < 500 - 10t.
    let t = (1u64..)
        .find(|&t| {
            let t = t as f64;
            590.0 - 50.0 * t < 500.0 - 10.0 * t
        })
        .unwrap();
    assert_eq!(t, 3);
    let config = ScenarioConfig {
        node_count: 2,
        ..Default::default()
    };
    let timeline = simulate_nodes(
        &config,
        vec![Node::new(0, 0.0, 0.0, 590.0), Node::new(1, 5.0, 0.0, 500.0)],
    )
    .unwrap();
    assert_eq!(timeline.head_changes().next().unwrap().at_tick, t);
}
