//! Independent brute-force re-implementations used as test oracles.
//!
//! These deliberately avoid the library's algorithms: they work on raw
//! coordinates, label vectors and full distance matrices.

#![allow(dead_code)]

use std::collections::BTreeSet;

pub fn l1(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs() + (a.1 - b.1).abs()
}

/// Dunn's index from every node pair at once: pairs in the same cluster feed
/// the maximum diameter, pairs across clusters feed the minimum distance.
/// `labels[i]` is the cluster of point `i`.
pub fn dunn_brute_force(points: &[(f64, f64)], labels: &[usize]) -> Option<f64> {
    let distinct: BTreeSet<usize> = labels.iter().copied().collect();
    if distinct.len() < 2 {
        return None;
    }
    let mut min_between = f64::INFINITY;
    let mut max_within = 0.0f64;
    for i in 0..points.len() {
        for j in 0..points.len() {
            if i == j {
                continue;
            }
            let d = l1(points[i], points[j]);
            if labels[i] == labels[j] {
                if d > max_within {
                    max_within = d;
                }
            } else if d < min_between {
                min_between = d;
            }
        }
    }
    if max_within == 0.0 {
        return if min_between > 0.0 {
            Some(f64::INFINITY)
        } else {
            None
        };
    }
    Some(min_between / max_within)
}

/// Ex-PAC executed as a list of literal steps over a distance matrix.
/// Returns `(temporary head, sorted members)` in selection order.
pub fn expac_literal(points: &[(f64, f64)], range: f64) -> Vec<(usize, Vec<usize>)> {
    let n = points.len();
    // Steps 1-4: every node as temporary head, count neighbours with MD < range.
    let mut cluster_of_head: Vec<Vec<bool>> = vec![vec![false; n]; n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        cluster_of_head[i][i] = true;
        for j in 0..n {
            if i != j && l1(points[i], points[j]) < range {
                cluster_of_head[i][j] = true;
                count[i] += 1;
            }
        }
    }
    let mut in_cluster = vec![false; n];
    let mut result = Vec::new();

    // Step 5: the first cluster is the maximum count (first index on ties).
    let mut first = 0;
    for i in 1..n {
        if count[i] > count[first] {
            first = i;
        }
    }
    let members: Vec<usize> = (0..n).filter(|&j| cluster_of_head[first][j]).collect();
    for &m in &members {
        in_cluster[m] = true;
    }
    result.push((first, members));

    // Steps 6-9: repeat until nothing changes.
    loop {
        let non_cluster: Vec<usize> = (0..n).filter(|&j| !in_cluster[j]).collect();
        let mut chosen: Option<usize> = None;
        let mut chosen_cover = 0;
        for i in 0..n {
            if in_cluster[i] {
                continue;
            }
            let cover = non_cluster
                .iter()
                .filter(|&&j| cluster_of_head[i][j])
                .count();
            if cover > chosen_cover {
                chosen = Some(i);
                chosen_cover = cover;
            }
        }
        let Some(head) = chosen else { break };
        let members: Vec<usize> = non_cluster
            .into_iter()
            .filter(|&j| cluster_of_head[head][j])
            .collect();
        for &m in &members {
            in_cluster[m] = true;
        }
        result.push((head, members));
    }
    result
}
