//! Energy-aware clustering for simulated ad hoc networks.
//!
//! The crate covers the whole pipeline a simulated network goes through:
//!
//! * [`clustering`]: range-based seeding and greedy Ex-PAC partitioning
//!   under the Manhattan metric.
//! * [`head_election`]: maximum-energy head election with a threshold-gated
//!   membership test (PSO-PAC) and head rotation as energy drains.
//! * [`addressing`]: stateful IPv6 assignment where each head acts as a
//!   DHCPv6-style server for its members.
//! * [`validation`]: Dunn's index over a cluster set and its mapping to
//!   separation, overlap and compactness (D-PAC).
//! * [`sim`]: a discrete-tick harness that drains energy, rotates heads,
//!   validates periodically and re-clusters when separation degrades.
//!
//! Everything is deterministic given a [`ScenarioConfig`], including its seed.

pub mod addressing;
pub mod clustering;
pub mod error;
pub mod head_election;
pub mod model;
pub mod sim;
pub mod validation;

pub use addressing::{assign_addresses, AddressPrefix, Message, MessageKind, MessageTrace};
pub use clustering::{expac_cluster, manhattan_distance, pac_candidates, CandidateCluster};
pub use error::{Error, Result};
pub use head_election::{
    max_energy_node, psopac_rebuild, refresh_admission, rotate_heads, Comparator, EnergySnapshot,
    HeadChange,
};
pub use model::{
    generate_scenario, Area, Cluster, ClusterSet, EnergyLevel, EnergyRange, Node, NodeId, Position,
    ScenarioConfig, RNG_NAME,
};
pub use sim::{
    drain, run_pipeline, run_simulation, simulate_nodes, AddressEvent, PipelineOutput,
    ReclusterEvent, SimEvent, SimSnapshot, Timeline,
};
pub use validation::{
    classify, cluster_diameter, dunn_index, inter_cluster_distance, validate, Classification,
    Compactness, ValidationReport,
};
