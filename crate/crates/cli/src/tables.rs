//! Row types for every exported table and the readers for the two tables the
//! tool consumes back (nodes and clusters).
//!
//! Column orders are fixed by the field order of each row struct.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::Write;
use std::net::Ipv6Addr;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use clusterbench::{
    Cluster, ClusterSet, Message, Node, NodeId, Position, SimEvent, ValidationReport,
};

use crate::failure::{CliResult, Failure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// `node_id,x,y,energy`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRow {
    pub node_id: usize,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
}

/// `cluster_id,node_id,is_head,exempt,x,y,energy`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRow {
    pub cluster_id: u32,
    pub node_id: usize,
    pub is_head: bool,
    pub exempt: bool,
    pub x: f64,
    pub y: f64,
    pub energy: f64,
}

/// `cluster_id,node_id,is_head,energy`, one file per cluster.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBarRow {
    pub cluster_id: u32,
    pub node_id: usize,
    pub is_head: bool,
    pub energy: f64,
}

/// `node_id,cluster_id,address`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AddressRow {
    pub node_id: usize,
    pub cluster_id: u32,
    pub address: String,
}

/// `seq,from,to,kind,payload`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceRow {
    pub seq: u64,
    pub from: usize,
    pub to: usize,
    pub kind: String,
    pub payload: Option<String>,
}

impl From<&Message> for TraceRow {
    fn from(m: &Message) -> Self {
        TraceRow {
            seq: m.seq,
            from: m.from.index(),
            to: m.to.index(),
            kind: m.kind.to_string(),
            payload: m.payload.map(|a| a.to_string()),
        }
    }
}

/// `num_nodes,dunn_index,separation_pct,overlap_pct,compactness,classification,recommend_recluster`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub num_nodes: usize,
    pub dunn_index: f64,
    pub separation_pct: u32,
    pub overlap_pct: u32,
    pub compactness: String,
    pub classification: String,
    pub recommend_recluster: bool,
}

impl ReportRow {
    pub fn new(num_nodes: usize, r: &ValidationReport) -> Self {
        ReportRow {
            num_nodes,
            dunn_index: r.dunn_index,
            separation_pct: r.separation_pct,
            overlap_pct: r.overlap_pct,
            compactness: r.compactness.to_string(),
            classification: r.classification.to_string(),
            recommend_recluster: r.recommend_recluster,
        }
    }
}

/// `tick,cluster_id,node_id,is_head,exempt,energy`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineRow {
    pub tick: u64,
    pub cluster_id: u32,
    pub node_id: usize,
    pub is_head: bool,
    pub exempt: bool,
    pub energy: f64,
}

/// `tick,dunn_index,separation_pct,overlap_pct,compactness,classification,recommend_recluster`
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TickReportRow {
    pub tick: u64,
    pub dunn_index: f64,
    pub separation_pct: u32,
    pub overlap_pct: u32,
    pub compactness: String,
    pub classification: String,
    pub recommend_recluster: bool,
}

/// `tick,kind,cluster_id,node_id,old_head,new_head,trigger_index,old_cluster_count,new_cluster_count,address`
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct EventRow {
    pub tick: u64,
    pub kind: &'static str,
    pub cluster_id: Option<u32>,
    pub node_id: Option<usize>,
    pub old_head: Option<usize>,
    pub new_head: Option<usize>,
    pub trigger_index: Option<f64>,
    pub old_cluster_count: Option<usize>,
    pub new_cluster_count: Option<usize>,
    pub address: Option<String>,
}

impl From<&SimEvent> for EventRow {
    fn from(e: &SimEvent) -> Self {
        match e {
            SimEvent::HeadChange(h) => EventRow {
                tick: h.at_tick,
                kind: "HeadChange",
                cluster_id: Some(h.cluster_id),
                old_head: Some(h.old_head.index()),
                new_head: Some(h.new_head.index()),
                ..Default::default()
            },
            SimEvent::Recluster(r) => EventRow {
                tick: r.at_tick,
                kind: "Recluster",
                trigger_index: Some(r.trigger_index),
                old_cluster_count: Some(r.old_cluster_count),
                new_cluster_count: Some(r.new_cluster_count),
                ..Default::default()
            },
            SimEvent::Address(a) => EventRow {
                tick: a.at_tick,
                kind: "Address",
                cluster_id: Some(a.cluster_id),
                node_id: Some(a.node_id.index()),
                address: Some(a.address.to_string()),
                ..Default::default()
            },
        }
    }
}

/// `num_nodes,seed,dunn_index,separation_pct,overlap_pct,compactness`;
/// an undefined index leaves the numeric columns empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub num_nodes: usize,
    pub seed: u64,
    pub dunn_index: Option<f64>,
    pub separation_pct: Option<u32>,
    pub overlap_pct: Option<u32>,
    pub compactness: String,
}

pub fn create_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::runtime)
}

/// Writes `rows` as CSV with a header, or as a pretty JSON array.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T], format: Format) -> CliResult<()> {
    let result = match format {
        Format::Csv => write_csv(path, rows),
        Format::Json => write_json(path, &rows),
    };
    result
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::runtime)
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Whitespace-separated numeric columns, one row per line, `#` header.
pub fn write_plot_data(path: &Path, header: &str, rows: &[Vec<f64>]) -> CliResult<()> {
    let write = || -> std::io::Result<()> {
        let mut f = File::create(path)?;
        writeln!(f, "# {header}")?;
        for row in rows {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    };
    write()
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::runtime)
}

fn read_csv<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let mut reader = csv::Reader::from_path(path)
        .with_context(|| format!("opening {}", path.display()))
        .map_err(Failure::input)?;
    reader
        .deserialize()
        .enumerate()
        .map(|(i, row)| {
            row.with_context(|| format!("{} row {}", path.display(), i + 2))
                .map_err(Failure::input)
        })
        .collect()
}

/// Rows sorted by id must be exactly `0..n`.
fn check_dense(path: &Path, ids: impl Iterator<Item = usize>) -> CliResult<()> {
    for (expected, id) in ids.enumerate() {
        if id != expected {
            return Err(Failure::input(anyhow!(
                "{}: node ids must be exactly 0..N without gaps or repeats (expected {expected}, found {id})",
                path.display()
            )));
        }
    }
    Ok(())
}

pub fn read_nodes(path: &Path) -> CliResult<Vec<Node>> {
    let mut rows: Vec<NodeRow> = read_csv(path)?;
    if rows.is_empty() {
        return Err(Failure::input(anyhow!("{}: no nodes", path.display())));
    }
    rows.sort_by_key(|r| r.node_id);
    check_dense(path, rows.iter().map(|r| r.node_id))?;
    Ok(rows
        .into_iter()
        .map(|r| Node::new(r.node_id, r.x, r.y, r.energy))
        .collect())
}

pub fn node_rows(nodes: &[Node]) -> Vec<NodeRow> {
    nodes
        .iter()
        .map(|n| NodeRow {
            node_id: n.id.index(),
            x: n.pos.x,
            y: n.pos.y,
            energy: n.energy.value(),
        })
        .collect()
}

pub fn cluster_rows(clusters: &ClusterSet, nodes: &[Node], energies: &[f64]) -> Vec<ClusterRow> {
    clusters
        .iter()
        .flat_map(|c| {
            c.members.iter().map(move |&m| {
                let n = &nodes[m.index()];
                ClusterRow {
                    cluster_id: c.cluster_id,
                    node_id: m.index(),
                    is_head: m == c.head,
                    exempt: c.is_exempt(m),
                    x: n.pos.x,
                    y: n.pos.y,
                    energy: energies[m.index()],
                }
            })
        })
        .collect()
}

/// A cluster table read back from disk.
pub struct ClusterTable {
    pub clusters: ClusterSet,
    pub positions: Vec<Position>,
}

pub fn read_clusters(path: &Path) -> CliResult<ClusterTable> {
    let rows: Vec<ClusterRow> = read_csv(path)?;
    if rows.is_empty() {
        return Err(Failure::input(anyhow!("{}: no rows", path.display())));
    }
    let mut by_node: Vec<&ClusterRow> = rows.iter().collect();
    by_node.sort_by_key(|r| r.node_id);
    check_dense(path, by_node.iter().map(|r| r.node_id))?;
    let positions = by_node.iter().map(|r| Position::new(r.x, r.y)).collect();

    let mut grouped: BTreeMap<u32, Vec<&ClusterRow>> = BTreeMap::new();
    for r in &rows {
        grouped.entry(r.cluster_id).or_default().push(r);
    }
    let mut clusters = Vec::with_capacity(grouped.len());
    for (cluster_id, members) in grouped {
        let heads: Vec<NodeId> = members
            .iter()
            .filter(|r| r.is_head)
            .map(|r| NodeId(r.node_id))
            .collect();
        let [head] = heads[..] else {
            return Err(Failure::input(anyhow!(
                "{}: cluster {cluster_id} has {} heads, expected exactly one",
                path.display(),
                heads.len()
            )));
        };
        let mut cluster = Cluster::new(cluster_id, head, members.iter().map(|r| NodeId(r.node_id)));
        cluster.exempt = members
            .iter()
            .filter(|r| r.exempt && !r.is_head)
            .map(|r| NodeId(r.node_id))
            .collect();
        clusters.push(cluster);
    }
    let clusters = ClusterSet::new(clusters, rows.len());
    clusters.check_partition()?;
    Ok(ClusterTable {
        clusters,
        positions,
    })
}

pub fn address_rows(
    clusters: &ClusterSet,
    addresses: &BTreeMap<NodeId, Ipv6Addr>,
) -> Vec<AddressRow> {
    let owner = clusters.owner_index();
    addresses
        .iter()
        .map(|(id, addr)| AddressRow {
            node_id: id.index(),
            cluster_id: owner[id.index()]
                .map(|i| clusters.clusters[i].cluster_id)
                .unwrap_or_default(),
            address: addr.to_string(),
        })
        .collect()
}
