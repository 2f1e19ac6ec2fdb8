//! Energy-driven head election over existing clusters.
//!
//! [`psopac_rebuild`] takes range-based clusters and rebuilds each one around
//! its highest-energy member, testing the remaining members against an energy
//! threshold. [`rotate_heads`] re-elects heads as energy drains over time.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cluster, ClusterSet, EnergyLevel, Node, NodeId};

/// Residual energy of every node at one tick, indexed by node id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySnapshot {
    pub at_tick: u64,
    pub energies: Vec<EnergyLevel>,
}

impl EnergySnapshot {
    pub fn new(at_tick: u64, energies: Vec<EnergyLevel>) -> Self {
        EnergySnapshot { at_tick, energies }
    }

    pub fn from_nodes(nodes: &[Node], at_tick: u64) -> Self {
        EnergySnapshot {
            at_tick,
            energies: nodes.iter().map(|n| n.energy).collect(),
        }
    }

    pub fn get(&self, id: NodeId) -> Result<EnergyLevel> {
        self.energies
            .get(id.index())
            .copied()
            .ok_or(Error::MissingEnergy(id))
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }
}

/// Which side of the energy threshold a non-head member must fall on to be
/// admitted into its rebuilt cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// `energy < threshold`, the predicate as literally stated.
    #[default]
    Below,
    /// `energy >= threshold`.
    #[serde(alias = "at-or-above")]
    AtOrAbove,
}

impl Comparator {
    pub fn admits(self, energy: EnergyLevel, threshold: f64) -> bool {
        match self {
            Comparator::Below => energy.value() < threshold,
            Comparator::AtOrAbove => energy.value() >= threshold,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Comparator::Below => "below",
            Comparator::AtOrAbove => "at_or_above",
        }
    }
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Comparator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "below" => Ok(Comparator::Below),
            "at_or_above" | "at-or-above" => Ok(Comparator::AtOrAbove),
            other => Err(format!(
                "unknown comparator `{other}` (expected below or at-or-above)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadChange {
    pub cluster_id: u32,
    pub old_head: NodeId,
    pub new_head: NodeId,
    pub at_tick: u64,
}

/// The member with the most residual energy; ties go to the lower id.
pub fn max_energy_node(cluster: &Cluster, snapshot: &EnergySnapshot) -> Result<NodeId> {
    let mut best: Option<(NodeId, EnergyLevel)> = None;
    for &m in &cluster.members {
        let e = snapshot.get(m)?;
        if best.is_none_or(|(_, top)| e.value() > top.value()) {
            best = Some((m, e));
        }
    }
    best.map(|(id, _)| id)
        .ok_or_else(|| Error::Consistency(format!("cluster {} is empty", cluster.cluster_id)))
}

fn exemptions(
    cluster: &Cluster,
    head: NodeId,
    snapshot: &EnergySnapshot,
    threshold: f64,
    comparator: Comparator,
) -> Result<std::collections::BTreeSet<NodeId>> {
    let mut exempt = std::collections::BTreeSet::new();
    for &m in &cluster.members {
        if m != head && !comparator.admits(snapshot.get(m)?, threshold) {
            exempt.insert(m);
        }
    }
    Ok(exempt)
}

/// Rebuilds every cluster around its maximum-energy member.
///
/// Non-head members that fail `comparator` against `threshold` stay in the
/// cluster but are flagged exempt. Cluster ids and membership are preserved.
pub fn psopac_rebuild(
    clusters: &ClusterSet,
    snapshot: &EnergySnapshot,
    threshold: f64,
    comparator: Comparator,
) -> Result<ClusterSet> {
    if clusters.is_empty() {
        return Err(Error::EmptyInput("cluster set"));
    }
    clusters.check_partition()?;
    let rebuilt = clusters
        .iter()
        .map(|c| {
            let head = max_energy_node(c, snapshot)?;
            Ok(Cluster {
                cluster_id: c.cluster_id,
                head,
                members: c.members.clone(),
                exempt: exemptions(c, head, snapshot, threshold, comparator)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterSet::new(rebuilt, clusters.node_universe))
}

/// Re-evaluates the membership predicate against a newer snapshot, leaving
/// heads and membership untouched.
pub fn refresh_admission(
    clusters: &ClusterSet,
    snapshot: &EnergySnapshot,
    threshold: f64,
    comparator: Comparator,
) -> Result<ClusterSet> {
    let refreshed = clusters
        .iter()
        .map(|c| {
            Ok(Cluster {
                exempt: exemptions(c, c.head, snapshot, threshold, comparator)?,
                ..c.clone()
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClusterSet::new(refreshed, clusters.node_universe))
}

/// Re-elects each head against `snapshot`, reporting every move.
pub fn rotate_heads(
    clusters: &ClusterSet,
    snapshot: &EnergySnapshot,
) -> Result<(ClusterSet, Vec<HeadChange>)> {
    let mut changes = Vec::new();
    let mut rotated = Vec::with_capacity(clusters.len());
    for c in clusters {
        let head = max_energy_node(c, snapshot)?;
        let mut next = c.clone();
        if head != c.head {
            changes.push(HeadChange {
                cluster_id: c.cluster_id,
                old_head: c.head,
                new_head: head,
                at_tick: snapshot.at_tick,
            });
            next.head = head;
            next.exempt.remove(&head);
        }
        rotated.push(next);
    }
    Ok((ClusterSet::new(rotated, clusters.node_universe), changes))
}
