//! Domain types shared by every stage, plus seeded scenario generation.

use std::collections::BTreeSet;
use std::fmt;
use std::net::Ipv6Addr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::addressing::AddressPrefix;
use crate::error::{Error, Result};
use crate::head_election::Comparator;

/// Name of the generator behind [`generate_scenario`], recorded in run metadata.
pub const RNG_NAME: &str = "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)";

/// Placement model recorded in run metadata.
pub const PLACEMENT: &str = "uniform";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Position { x, y }
    }
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    pub const fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Residual energy in dimensionless units. Never negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnergyLevel(f64);

impl EnergyLevel {
    /// Negative inputs clamp to zero.
    pub fn new(value: f64) -> Self {
        EnergyLevel(value.max(0.0))
    }

    pub const fn value(self) -> f64 {
        self.0
    }

    pub fn drained(self, amount: f64) -> Self {
        EnergyLevel::new(self.0 - amount)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: NodeId,
    pub pos: Position,
    pub energy: EnergyLevel,
    pub address: Option<Ipv6Addr>,
}

impl Node {
    pub fn new(id: usize, x: f64, y: f64, energy: f64) -> Self {
        Node {
            id: NodeId(id),
            pos: Position::new(x, y),
            energy: EnergyLevel::new(energy),
            address: None,
        }
    }
}

/// One head plus its members. The head is always a member.
///
/// `exempt` holds members that failed the head-election energy predicate;
/// they stay attached so the cluster set remains a partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cluster {
    pub cluster_id: u32,
    pub head: NodeId,
    pub members: BTreeSet<NodeId>,
    #[serde(default)]
    pub exempt: BTreeSet<NodeId>,
}

impl Cluster {
    pub fn new(cluster_id: u32, head: NodeId, members: impl IntoIterator<Item = NodeId>) -> Self {
        let mut members: BTreeSet<NodeId> = members.into_iter().collect();
        members.insert(head);
        Cluster {
            cluster_id,
            head,
            members,
            exempt: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.members.contains(&id)
    }

    pub fn is_exempt(&self, id: NodeId) -> bool {
        self.exempt.contains(&id)
    }

    /// Members other than the head, ascending.
    pub fn non_head_members(&self) -> impl Iterator<Item = NodeId> + '_ {
        let head = self.head;
        self.members.iter().copied().filter(move |&m| m != head)
    }

    /// Head plus every member that passed the energy predicate.
    pub fn admitted(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.members
            .iter()
            .copied()
            .filter(move |m| !self.exempt.contains(m))
    }
}

/// A partition of the node universe `0..node_universe` into clusters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
    pub node_universe: usize,
}

impl ClusterSet {
    pub fn new(clusters: Vec<Cluster>, node_universe: usize) -> Self {
        ClusterSet {
            clusters,
            node_universe,
        }
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Cluster> {
        self.clusters.iter()
    }

    pub fn member_count(&self) -> usize {
        self.clusters.iter().map(Cluster::len).sum()
    }

    /// `owner[node] = index into clusters`, or `None` for unassigned nodes.
    pub fn owner_index(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.node_universe];
        for (idx, c) in self.clusters.iter().enumerate() {
            for m in &c.members {
                if let Some(slot) = owner.get_mut(m.index()) {
                    *slot = Some(idx);
                }
            }
        }
        owner
    }

    pub fn cluster_of(&self, id: NodeId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.contains(id))
    }

    /// Checks disjointness and coverage of `0..node_universe`, plus the
    /// per-cluster head and exemption invariants.
    pub fn check_partition(&self) -> Result<()> {
        let mut owner: Vec<Option<u32>> = vec![None; self.node_universe];
        for c in &self.clusters {
            if c.members.is_empty() {
                return Err(Error::Consistency(format!(
                    "cluster {} has no members",
                    c.cluster_id
                )));
            }
            if !c.members.contains(&c.head) {
                return Err(Error::Consistency(format!(
                    "head {} of cluster {} is not a member",
                    c.head, c.cluster_id
                )));
            }
            if c.exempt.contains(&c.head) || !c.exempt.is_subset(&c.members) {
                return Err(Error::Consistency(format!(
                    "cluster {} has an exemption outside its non-head members",
                    c.cluster_id
                )));
            }
            for &m in &c.members {
                let slot = owner.get_mut(m.index()).ok_or_else(|| {
                    Error::Consistency(format!(
                        "node {m} outside universe of {} nodes",
                        self.node_universe
                    ))
                })?;
                if let Some(prev) = *slot {
                    return Err(Error::Overlap(prev, c.cluster_id, m));
                }
                *slot = Some(c.cluster_id);
            }
        }
        if let Some(missing) = owner.iter().position(Option::is_none) {
            return Err(Error::Consistency(format!(
                "node {missing} belongs to no cluster"
            )));
        }
        Ok(())
    }

    /// The same clusters restricted to their admitted members (exempt members
    /// removed). No longer a partition when any member is exempt.
    pub fn admitted_view(&self) -> ClusterSet {
        let clusters = self
            .clusters
            .iter()
            .map(|c| Cluster {
                cluster_id: c.cluster_id,
                head: c.head,
                members: c.admitted().collect(),
                exempt: BTreeSet::new(),
            })
            .collect();
        ClusterSet::new(clusters, self.node_universe)
    }
}

impl<'a> IntoIterator for &'a ClusterSet {
    type Item = &'a Cluster;
    type IntoIter = std::slice::Iter<'a, Cluster>;

    fn into_iter(self) -> Self::IntoIter {
        self.clusters.iter()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyRange {
    pub min: f64,
    pub max: f64,
}

/// Every knob of a simulated run. Defaults follow the reference setup:
/// 25 nodes on a 100 x 100 field, 20 m range, energy threshold 500,
/// 5 s of simulated time in 1 s ticks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub node_count: usize,
    pub area: Area,
    pub tx_range: f64,
    pub energy_threshold: f64,
    pub execution_time: f64,
    pub tick: f64,
    pub seed: u64,
    pub initial_energy: EnergyRange,
    pub drain_member: f64,
    pub drain_head: f64,
    pub dunn_recluster_threshold: f64,
    /// Validate every this many ticks.
    pub validation_interval: u64,
    pub comparator: Comparator,
    pub address_prefix: AddressPrefix,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            node_count: 25,
            area: Area {
                width: 100.0,
                height: 100.0,
            },
            tx_range: 20.0,
            energy_threshold: 500.0,
            execution_time: 5.0,
            tick: 1.0,
            seed: 1,
            initial_energy: EnergyRange {
                min: 400.0,
                max: 1000.0,
            },
            drain_member: 10.0,
            drain_head: 50.0,
            dunn_recluster_threshold: 0.5,
            validation_interval: 1,
            comparator: Comparator::Below,
            address_prefix: AddressPrefix::default(),
        }
    }
}

impl ScenarioConfig {
    pub const KEYS: &'static [&'static str] = &[
        "node_count",
        "area",
        "tx_range",
        "energy_threshold",
        "execution_time",
        "tick",
        "seed",
        "initial_energy",
        "drain_member",
        "drain_head",
        "dunn_recluster_threshold",
        "validation_interval",
        "comparator",
        "address_prefix",
    ];

    /// Parses a JSON object; absent fields take their defaults and every
    /// unknown top-level key is reported at once.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Self::from_json_value(value)
    }

    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let obj = value.as_object().ok_or(Error::Config {
            field: "<root>",
            reason: "must be a JSON object".into(),
        })?;
        let unknown: Vec<String> = obj
            .keys()
            .filter(|k| !Self::KEYS.contains(&k.as_str()))
            .cloned()
            .collect();
        if !unknown.is_empty() {
            return Err(Error::UnknownKeys(unknown));
        }
        let config: ScenarioConfig = serde_json::from_value(value)?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        fn bad(field: &'static str, reason: &str) -> Result<()> {
            Err(Error::Config {
                field,
                reason: reason.to_string(),
            })
        }
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        let finite_nonneg = |v: f64| v.is_finite() && v >= 0.0;

        if self.node_count < 1 {
            return bad("node_count", "must be at least 1");
        }
        if !finite_pos(self.area.width) {
            return bad("area.width", "must be a positive finite number");
        }
        if !finite_pos(self.area.height) {
            return bad("area.height", "must be a positive finite number");
        }
        if !finite_pos(self.tx_range) {
            return bad("tx_range", "must be a positive finite number");
        }
        if !finite_pos(self.tick) {
            return bad("tick", "must be a positive finite number");
        }
        if !finite_nonneg(self.execution_time) {
            return bad("execution_time", "must be a non-negative finite number");
        }
        if !finite_nonneg(self.energy_threshold) {
            return bad("energy_threshold", "must be a non-negative finite number");
        }
        if !finite_nonneg(self.initial_energy.min) {
            return bad("initial_energy.min", "must be a non-negative finite number");
        }
        if !self.initial_energy.max.is_finite() || self.initial_energy.max < self.initial_energy.min
        {
            return bad(
                "initial_energy.max",
                "must be finite and >= initial_energy.min",
            );
        }
        if !finite_nonneg(self.drain_member) {
            return bad("drain_member", "must be a non-negative finite number");
        }
        if !self.drain_head.is_finite() || self.drain_head < self.drain_member {
            return bad("drain_head", "must be finite and >= drain_member");
        }
        if !finite_nonneg(self.dunn_recluster_threshold) {
            return bad(
                "dunn_recluster_threshold",
                "must be a non-negative finite number",
            );
        }
        if self.validation_interval < 1 {
            return bad("validation_interval", "must be at least 1");
        }
        Ok(())
    }

    /// Number of ticks after the initial one.
    pub fn tick_count(&self) -> u64 {
        (self.execution_time / self.tick + 1e-9).floor() as u64
    }
}

/// Places `node_count` nodes uniformly over the area with uniform initial
/// energies. A pure function of `config`.
pub fn generate_scenario(config: &ScenarioConfig) -> Result<Vec<Node>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let nodes = (0..config.node_count)
        .map(|id| {
            let x = rng.random_range(0.0..=config.area.width);
            let y = rng.random_range(0.0..=config.area.height);
            let e = rng.random_range(config.initial_energy.min..=config.initial_energy.max);
            Node::new(id, x, y, e)
        })
        .collect();
    Ok(nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_node_scenario() {
        let config = ScenarioConfig {
            node_count: 1,
            seed: 99,
            ..Default::default()
        };
        let nodes = generate_scenario(&config).unwrap();
        assert_eq!(nodes.len(), 1);
        assert_eq!(nodes[0].id, NodeId(0));
        assert!(nodes[0].address.is_none());
    }

    #[test]
    fn default_scenario_stays_in_area() {
        let config = ScenarioConfig::default();
        let nodes = generate_scenario(&config).unwrap();
        assert_eq!(nodes.len(), 25);
        for (i, n) in nodes.iter().enumerate() {
            assert_eq!(n.id, NodeId(i));
            assert!((0.0..=100.0).contains(&n.pos.x));
            assert!((0.0..=100.0).contains(&n.pos.y));
            assert!((400.0..=1000.0).contains(&n.energy.value()));
        }
    }

    #[test]
    fn same_seed_same_nodes() {
        let config = ScenarioConfig {
            seed: 7,
            ..Default::default()
        };
        let a = serde_json::to_string(&generate_scenario(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&generate_scenario(&config).unwrap()).unwrap();
        assert_eq!(a, b);
        let other = ScenarioConfig {
            seed: 8,
            ..Default::default()
        };
        let c = serde_json::to_string(&generate_scenario(&other).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn energy_clamps_at_zero() {
        assert_eq!(EnergyLevel::new(5.0).drained(10.0).value(), 0.0);
        assert_eq!(EnergyLevel::new(-3.0).value(), 0.0);
    }

    #[test]
    fn config_defaults_from_empty_object() {
        let config = ScenarioConfig::from_json_str("{}").unwrap();
        assert_eq!(config, ScenarioConfig::default());
        assert_eq!(config.tick_count(), 5);
    }

    #[test]
    fn config_rejects_unknown_keys_listing_all() {
        let err = ScenarioConfig::from_json_str(r#"{"nodes": 3, "node_count": 4, "speed": 1}"#)
            .unwrap_err();
        match err {
            Error::UnknownKeys(keys) => {
                assert_eq!(keys, vec!["nodes".to_string(), "speed".to_string()])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_names_offending_field() {
        let cases = [
            (r#"{"node_count": 0}"#, "node_count"),
            (r#"{"tx_range": 0}"#, "tx_range"),
            (r#"{"tick": -1}"#, "tick"),
            (r#"{"drain_member": 60}"#, "drain_head"),
            (
                r#"{"initial_energy": {"min": 10, "max": 5}}"#,
                "initial_energy.max",
            ),
        ];
        for (text, field) in cases {
            match ScenarioConfig::from_json_str(text).unwrap_err() {
                Error::Config { field: f, .. } => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn partition_check_catches_overlap_and_gaps() {
        let ok = ClusterSet::new(
            vec![
                Cluster::new(0, NodeId(0), [NodeId(1)]),
                Cluster::new(1, NodeId(2), []),
            ],
            3,
        );
        ok.check_partition().unwrap();

        let overlap = ClusterSet::new(
            vec![
                Cluster::new(0, NodeId(0), [NodeId(1)]),
                Cluster::new(1, NodeId(1), [NodeId(2)]),
            ],
            3,
        );
        assert!(matches!(
            overlap.check_partition(),
            Err(Error::Overlap(0, 1, NodeId(1)))
        ));

        let gap = ClusterSet::new(vec![Cluster::new(0, NodeId(0), [])], 2);
        assert!(gap.check_partition().is_err());
    }
}
