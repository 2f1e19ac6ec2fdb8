use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use rayon::prelude::*;

use clusterbench::{
    assign_addresses, classify, expac_cluster, generate_scenario, psopac_rebuild, run_pipeline,
    simulate_nodes, validate, EnergySnapshot, Error, NodeId, ScenarioConfig, SimEvent,
    ValidationReport,
};

use crate::failure::{CliResult, Failure};
use crate::manifest::{resolve, Resolved, RunManifest, SweepPlan};
use crate::tables::{self, Format};
use crate::Common;

fn out_dir(common: &Common) -> CliResult<PathBuf> {
    let dir = common.out.clone().unwrap_or_else(|| PathBuf::from("."));
    tables::create_dir(&dir)?;
    Ok(dir)
}

fn resolve_common(common: &Common) -> CliResult<Resolved> {
    resolve(
        common.config.as_deref(),
        common.manifest.as_deref(),
        common.seed,
        common.comparator,
    )
}

fn file(dir: &Path, stem: &str, format: Format) -> PathBuf {
    dir.join(format!("{stem}.{}", format.ext()))
}

/// `num_nodes, index, sep%, ovl%, compactness`, plus a note line when the
/// index hits a reference row.
pub fn report_line(num_nodes: usize, r: &ValidationReport) -> String {
    let index = if r.dunn_index.is_finite() {
        format!("{:.2}", r.dunn_index)
    } else {
        "inf".to_string()
    };
    let mut line = format!(
        "{num_nodes}, {index}, {}%, {}%, {}",
        r.separation_pct, r.overlap_pct, r.compactness
    );
    if r.dunn_index.is_infinite() {
        line.push_str(" (Degenerate)");
    }
    if let Some(note) = r.footnote() {
        line.push_str("\nnote: ");
        line.push_str(&note);
    }
    line
}

pub fn generate(common: &Common) -> CliResult<()> {
    let resolved = resolve_common(common)?;
    let dir = out_dir(common)?;
    let nodes = generate_scenario(&resolved.config)?;
    let path = file(&dir, "nodes", common.format);
    tables::write_rows(&path, &tables::node_rows(&nodes), common.format)?;
    RunManifest::new("generate", &resolved.config, resolved.created_unix).write(&dir)?;
    say!("wrote {} nodes to {}", nodes.len(), path.display());
    Ok(())
}

pub fn cluster(common: &Common, nodes_path: &Path) -> CliResult<()> {
    let resolved = resolve_common(common)?;
    let config = &resolved.config;
    let nodes = tables::read_nodes(nodes_path)?;
    let dir = out_dir(common)?;

    let energies = EnergySnapshot::from_nodes(&nodes, 0);
    let formed = expac_cluster(&nodes, config.tx_range)?;
    let clusters = psopac_rebuild(
        &formed,
        &energies,
        config.energy_threshold,
        config.comparator,
    )?;
    let (addresses, trace) = assign_addresses(&clusters, config.address_prefix)?;

    let energy_values: Vec<f64> = energies.energies.iter().map(|e| e.value()).collect();
    let rows = tables::cluster_rows(&clusters, &nodes, &energy_values);
    tables::write_rows(&file(&dir, "clusters", common.format), &rows, common.format)?;

    let graphs = dir.join("energy_graph");
    tables::create_dir(&graphs)?;
    for c in &clusters {
        let bars: Vec<tables::EnergyBarRow> = c
            .members
            .iter()
            .map(|&m| tables::EnergyBarRow {
                cluster_id: c.cluster_id,
                node_id: m.index(),
                is_head: m == c.head,
                energy: energy_values[m.index()],
            })
            .collect();
        let stem = format!("cluster_{:03}", c.cluster_id);
        tables::write_rows(&file(&graphs, &stem, common.format), &bars, common.format)?;
    }

    tables::write_rows(
        &file(&dir, "addresses", common.format),
        &tables::address_rows(&clusters, &addresses),
        common.format,
    )?;
    let trace_rows: Vec<tables::TraceRow> = trace.iter().map(Into::into).collect();
    tables::write_rows(
        &file(&dir, "trace", common.format),
        &trace_rows,
        common.format,
    )?;

    let mut manifest = RunManifest::new("cluster", config, resolved.created_unix);
    manifest.input = Some(nodes_path.to_path_buf());
    manifest.write(&dir)?;

    say!(
        "{} nodes -> {} clusters ({} comparator), {} messages",
        nodes.len(),
        clusters.len(),
        config.comparator,
        trace.len()
    );
    for c in &clusters {
        say!(
            "cluster {}: head {} ({} members, {} exempt)",
            c.cluster_id,
            c.head,
            c.len(),
            c.exempt.len()
        );
    }
    Ok(())
}

pub fn validate_cmd(
    common: &Common,
    clusters_path: &Path,
    strict: bool,
    all_members: bool,
) -> CliResult<()> {
    let resolved = resolve_common(common)?;
    let table = tables::read_clusters(clusters_path)?;
    let num_nodes = table.positions.len();
    let view = if all_members {
        table.clusters.clone()
    } else {
        table.clusters.admitted_view()
    };
    let report = match validate(
        &view,
        &table.positions,
        resolved.config.dunn_recluster_threshold,
    ) {
        Ok(r) => r,
        Err(e @ Error::UndefinedIndex(_)) => {
            if strict {
                return Err(Failure::domain(e));
            }
            say!("{num_nodes}, UNDEFINED_INDEX");
            return Ok(());
        }
        Err(e) => return Err(e.into()),
    };
    say!("{}", report_line(num_nodes, &report));

    if let Some(dir) = &common.out {
        tables::create_dir(dir)?;
        let row = tables::ReportRow::new(num_nodes, &report);
        tables::write_rows(&file(dir, "report", common.format), &[row], common.format)?;
        let mut manifest = RunManifest::new("validate", &resolved.config, resolved.created_unix);
        manifest.input = Some(clusters_path.to_path_buf());
        manifest.write(dir)?;
    }
    Ok(())
}

pub fn simulate(common: &Common) -> CliResult<()> {
    let resolved = resolve_common(common)?;
    let config = &resolved.config;
    let dir = out_dir(common)?;
    let nodes = generate_scenario(config)?;
    let timeline = simulate_nodes(config, nodes)?;

    match common.format {
        Format::Json => {
            tables::write_json(&dir.join("timeline.json"), &timeline).map_err(Failure::runtime)?
        }
        Format::Csv => {
            let mut rows = Vec::new();
            let mut reports = Vec::new();
            for s in &timeline.snapshots {
                for c in &s.clusters {
                    for &m in &c.members {
                        rows.push(tables::TimelineRow {
                            tick: s.at_tick,
                            cluster_id: c.cluster_id,
                            node_id: m.index(),
                            is_head: m == c.head,
                            exempt: c.is_exempt(m),
                            energy: s.energies.energies[m.index()].value(),
                        });
                    }
                }
                if let Some(r) = &s.report {
                    reports.push(tables::TickReportRow {
                        tick: s.at_tick,
                        dunn_index: r.dunn_index,
                        separation_pct: r.separation_pct,
                        overlap_pct: r.overlap_pct,
                        compactness: r.compactness.to_string(),
                        classification: r.classification.to_string(),
                        recommend_recluster: r.recommend_recluster,
                    });
                }
            }
            tables::write_rows(&dir.join("timeline.csv"), &rows, Format::Csv)?;
            tables::write_rows(&dir.join("reports.csv"), &reports, Format::Csv)?;
            let events: Vec<tables::EventRow> = timeline.events().map(Into::into).collect();
            tables::write_rows(&dir.join("events.csv"), &events, Format::Csv)?;

            let mut latest: BTreeMap<NodeId, tables::AddressRow> = BTreeMap::new();
            for e in timeline.events() {
                if let SimEvent::Address(a) = e {
                    latest.insert(
                        a.node_id,
                        tables::AddressRow {
                            node_id: a.node_id.index(),
                            cluster_id: a.cluster_id,
                            address: a.address.to_string(),
                        },
                    );
                }
            }
            let final_rows: Vec<_> = latest.into_values().collect();
            tables::write_rows(&dir.join("addresses.csv"), &final_rows, Format::Csv)?;
        }
    }
    RunManifest::new("simulate", config, resolved.created_unix).write(&dir)?;

    say!(
        "{} snapshots, {} head changes, {} re-clusterings",
        timeline.snapshots.len(),
        timeline.head_changes().count(),
        timeline.reclusters().count()
    );
    Ok(())
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    Some(if values.len().is_multiple_of(2) {
        (values[mid - 1] + values[mid]) / 2.0
    } else {
        values[mid]
    })
}

/// Tick-0 index for one scenario, `None` when undefined.
pub fn sweep_point(
    config: &ScenarioConfig,
    all_members: bool,
) -> clusterbench::Result<Option<f64>> {
    let nodes = generate_scenario(config)?;
    let energies = EnergySnapshot::from_nodes(&nodes, 0);
    let out = run_pipeline(&nodes, &energies, config)?;
    let positions: Vec<_> = nodes.iter().map(|n| n.pos).collect();
    if !all_members {
        return Ok(out.report.map(|r| r.dunn_index));
    }
    match clusterbench::dunn_index(&out.clusters, &positions) {
        Ok(i) => Ok(Some(i)),
        Err(Error::UndefinedIndex(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn sweep(
    common: &Common,
    sizes: Option<Vec<usize>>,
    seeds: Option<u64>,
    all_members: bool,
) -> CliResult<()> {
    let resolved = resolve_common(common)?;
    let base = resolved.config;
    let planned = resolved.sweep.unwrap_or(SweepPlan {
        sizes: vec![25, 50, 300],
        seeds: 20,
    });
    let plan = SweepPlan {
        sizes: sizes.unwrap_or(planned.sizes),
        seeds: seeds.unwrap_or(planned.seeds),
    };
    if plan.sizes.is_empty() || plan.sizes.contains(&0) || plan.seeds == 0 {
        return Err(Failure::config(anyhow!(
            "sweep needs at least one positive size and one seed"
        )));
    }
    let dir = out_dir(common)?;

    let jobs: Vec<ScenarioConfig> = plan
        .sizes
        .iter()
        .flat_map(|&n| {
            let base = &base;
            (0..plan.seeds).map(move |i| ScenarioConfig {
                node_count: n,
                seed: base.seed.wrapping_add(i),
                ..base.clone()
            })
        })
        .collect();
    // Collected in job order, so the output does not depend on the thread count.
    let results: Vec<Option<f64>> = jobs
        .par_iter()
        .map(|c| sweep_point(c, all_members))
        .collect::<Result<_, _>>()?;

    let threshold = base.dunn_recluster_threshold;
    let mut rows = Vec::with_capacity(jobs.len());
    let mut per_size: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (job, index) in jobs.iter().zip(&results) {
        let report = index.map(|i| classify(i, threshold)).transpose()?;
        rows.push(tables::SweepRow {
            num_nodes: job.node_count,
            seed: job.seed,
            dunn_index: *index,
            separation_pct: report.map(|r| r.separation_pct),
            overlap_pct: report.map(|r| r.overlap_pct),
            compactness: report
                .map(|r| r.compactness.to_string())
                .unwrap_or_else(|| "UNDEFINED_INDEX".into()),
        });
        let entry = per_size.entry(job.node_count).or_default();
        if let Some(i) = index {
            entry.push(*i);
        }
    }
    tables::write_rows(&file(&dir, "sweep", common.format), &rows, common.format)?;

    let mut index_series = Vec::new();
    let mut overlap_series = Vec::new();
    let mut compact_series = Vec::new();
    for &n in &plan.sizes {
        let Some(values) = per_size.get_mut(&n) else {
            continue;
        };
        let Some(m) = median(values) else {
            say!("{n}, UNDEFINED_INDEX");
            continue;
        };
        let r = classify(m, threshold)?;
        index_series.push(vec![n as f64, m]);
        overlap_series.push(vec![
            n as f64,
            f64::from(r.separation_pct),
            f64::from(r.overlap_pct),
        ]);
        compact_series.push(vec![n as f64, f64::from(r.compactness.level())]);
        say!("{}", report_line(n, &r));
    }
    tables::write_plot_data(
        &dir.join("index_vs_nodes.dat"),
        "num_nodes median_dunn_index",
        &index_series,
    )?;
    tables::write_plot_data(
        &dir.join("overlap_vs_nodes.dat"),
        "num_nodes separation_pct overlap_pct",
        &overlap_series,
    )?;
    tables::write_plot_data(
        &dir.join("compactness_vs_nodes.dat"),
        "num_nodes compactness_level(2=High,1=Low,0=VeryLow)",
        &compact_series,
    )?;

    let mut manifest = RunManifest::new("sweep", &base, resolved.created_unix);
    manifest.sweep = Some(plan);
    manifest.write(&dir)?;
    Ok(())
}
