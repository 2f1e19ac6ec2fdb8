//! Discrete-tick simulation harness.
//!
//! Tick 0 runs the full pipeline: Ex-PAC clustering, energy-based head
//! election, address assignment and validation. Every later tick drains
//! energy, rotates heads, re-evaluates the membership predicate and, every
//! `validation_interval` ticks, validates again. A validation below
//! `dunn_recluster_threshold` re-runs the pipeline on the current energies.
//!
//! Validation looks at each cluster's admitted members (head plus members
//! that pass the energy predicate), so draining energy moves the index.

use std::collections::BTreeMap;
use std::net::Ipv6Addr;

use serde::{Deserialize, Serialize};

use crate::addressing::{assign_addresses, MessageTrace};
use crate::clustering::expac_cluster;
use crate::error::{Error, Result};
use crate::head_election::{
    psopac_rebuild, refresh_admission, rotate_heads, Comparator, EnergySnapshot, HeadChange,
};
use crate::model::{generate_scenario, ClusterSet, Node, NodeId, Position, ScenarioConfig};
use crate::validation::{validate, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReclusterEvent {
    pub at_tick: u64,
    pub trigger_index: f64,
    pub old_cluster_count: usize,
    pub new_cluster_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AddressEvent {
    pub at_tick: u64,
    pub node_id: NodeId,
    pub cluster_id: u32,
    pub address: Ipv6Addr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SimEvent {
    HeadChange(HeadChange),
    Recluster(ReclusterEvent),
    Address(AddressEvent),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSnapshot {
    pub at_tick: u64,
    pub clusters: ClusterSet,
    pub energies: EnergySnapshot,
    /// `None` on ticks without validation or when the index is undefined
    /// (fewer than two clusters).
    pub report: Option<ValidationReport>,
    pub events: Vec<SimEvent>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub comparator: Comparator,
    /// Nodes as placed, with their tick-0 addresses.
    pub nodes: Vec<Node>,
    pub snapshots: Vec<SimSnapshot>,
}

impl Timeline {
    pub fn events(&self) -> impl Iterator<Item = &SimEvent> {
        self.snapshots.iter().flat_map(|s| s.events.iter())
    }

    pub fn head_changes(&self) -> impl Iterator<Item = &HeadChange> {
        self.events().filter_map(|e| match e {
            SimEvent::HeadChange(h) => Some(h),
            _ => None,
        })
    }

    pub fn reclusters(&self) -> impl Iterator<Item = &ReclusterEvent> {
        self.events().filter_map(|e| match e {
            SimEvent::Recluster(r) => Some(r),
            _ => None,
        })
    }
}

/// Output of one clustering pass.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub clusters: ClusterSet,
    pub addresses: BTreeMap<NodeId, Ipv6Addr>,
    pub trace: MessageTrace,
    pub report: Option<ValidationReport>,
}

/// One tick of energy consumption: heads lose `drain_head`, everyone else
/// `drain_member`, clamped at zero.
pub fn drain(
    energies: &EnergySnapshot,
    clusters: &ClusterSet,
    config: &ScenarioConfig,
) -> EnergySnapshot {
    let mut next = energies.energies.clone();
    for c in clusters {
        for &m in &c.members {
            if let Some(e) = next.get_mut(m.index()) {
                let rate = if m == c.head {
                    config.drain_head
                } else {
                    config.drain_member
                };
                *e = e.drained(rate);
            }
        }
    }
    EnergySnapshot::new(energies.at_tick + 1, next)
}

fn positions(nodes: &[Node]) -> Vec<Position> {
    nodes.iter().map(|n| n.pos).collect()
}

/// Validates the admitted view of `clusters`; an undefined index (fewer than
/// two clusters) yields `None`.
pub fn assess(
    clusters: &ClusterSet,
    positions: &[Position],
    config: &ScenarioConfig,
) -> Result<Option<ValidationReport>> {
    match validate(
        &clusters.admitted_view(),
        positions,
        config.dunn_recluster_threshold,
    ) {
        Ok(report) => Ok(Some(report)),
        Err(Error::UndefinedIndex(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Cluster, elect, address and validate `nodes` under `energies`.
pub fn run_pipeline(
    nodes: &[Node],
    energies: &EnergySnapshot,
    config: &ScenarioConfig,
) -> Result<PipelineOutput> {
    let formed = expac_cluster(nodes, config.tx_range)?;
    let clusters = psopac_rebuild(
        &formed,
        energies,
        config.energy_threshold,
        config.comparator,
    )?;
    let (addresses, trace) = assign_addresses(&clusters, config.address_prefix)?;
    let report = assess(&clusters, &positions(nodes), config)?;
    Ok(PipelineOutput {
        clusters,
        addresses,
        trace,
        report,
    })
}

fn address_events(
    at_tick: u64,
    clusters: &ClusterSet,
    addresses: &BTreeMap<NodeId, Ipv6Addr>,
    previous: Option<&BTreeMap<NodeId, Ipv6Addr>>,
) -> Vec<SimEvent> {
    let owner = clusters.owner_index();
    addresses
        .iter()
        .filter(|(id, addr)| previous.and_then(|p| p.get(id)) != Some(addr))
        .map(|(&node_id, &address)| {
            let cluster_id = owner[node_id.index()]
                .map(|i| clusters.clusters[i].cluster_id)
                .unwrap_or_default();
            SimEvent::Address(AddressEvent {
                at_tick,
                node_id,
                cluster_id,
                address,
            })
        })
        .collect()
}

/// Runs the timeline over an explicit node list instead of a generated one.
pub fn simulate_nodes(config: &ScenarioConfig, nodes: Vec<Node>) -> Result<Timeline> {
    config.validate()?;
    let pos = positions(&nodes);

    let mut energies = EnergySnapshot::from_nodes(&nodes, 0);
    let initial = run_pipeline(&nodes, &energies, config).map_err(|e| e.at_tick(0))?;
    let mut clusters = initial.clusters;
    let mut addresses = initial.addresses;

    let mut nodes = nodes;
    for n in &mut nodes {
        n.address = addresses.get(&n.id).copied();
    }

    let mut snapshots = vec![SimSnapshot {
        at_tick: 0,
        clusters: clusters.clone(),
        energies: energies.clone(),
        report: initial.report,
        events: address_events(0, &clusters, &addresses, None),
    }];

    for tick in 1..=config.tick_count() {
        let mut step = || -> Result<SimSnapshot> {
            let drained = drain(&energies, &clusters, config);
            let (rotated, changes) = rotate_heads(&clusters, &drained)?;
            let mut current = refresh_admission(
                &rotated,
                &drained,
                config.energy_threshold,
                config.comparator,
            )?;
            let mut events: Vec<SimEvent> = changes.into_iter().map(SimEvent::HeadChange).collect();

            let mut report = None;
            if tick % config.validation_interval == 0 {
                report = assess(&current, &pos, config)?;
            }
            if let Some(r) = report.filter(|r| r.recommend_recluster) {
                let rebuilt = run_pipeline(&nodes, &drained, config)?;
                events.push(SimEvent::Recluster(ReclusterEvent {
                    at_tick: tick,
                    trigger_index: r.dunn_index,
                    old_cluster_count: current.len(),
                    new_cluster_count: rebuilt.clusters.len(),
                }));
                events.extend(address_events(
                    tick,
                    &rebuilt.clusters,
                    &rebuilt.addresses,
                    Some(&addresses),
                ));
                current = rebuilt.clusters;
                addresses = rebuilt.addresses;
            }
            Ok(SimSnapshot {
                at_tick: tick,
                clusters: current,
                energies: drained,
                report,
                events,
            })
        };
        let snapshot = step().map_err(|e| e.at_tick(tick))?;
        energies = snapshot.energies.clone();
        clusters = snapshot.clusters.clone();
        snapshots.push(snapshot);
    }

    Ok(Timeline {
        comparator: config.comparator,
        nodes,
        snapshots,
    })
}

/// Generates the scenario described by `config` and simulates it.
pub fn run_simulation(config: &ScenarioConfig) -> Result<Timeline> {
    simulate_nodes(config, generate_scenario(config)?)
}
