use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use clusterbench::{
    dunn_index, expac_cluster, generate_scenario, run_pipeline, EnergySnapshot, Position,
    ScenarioConfig,
};

fn config(n: usize) -> ScenarioConfig {
    ScenarioConfig {
        node_count: n,
        seed: 7,
        ..Default::default()
    }
}

fn pipeline(c: &mut Criterion) {
    let mut group = c.benchmark_group("pipeline");
    for n in [25usize, 50, 300] {
        let cfg = config(n);
        let nodes = generate_scenario(&cfg).unwrap();
        let energies = EnergySnapshot::from_nodes(&nodes, 0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| run_pipeline(black_box(&nodes), &energies, &cfg).unwrap())
        });
    }
    group.finish();
}

fn expac(c: &mut Criterion) {
    let mut group = c.benchmark_group("expac");
    for n in [50usize, 300] {
        let cfg = config(n);
        let nodes = generate_scenario(&cfg).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| expac_cluster(black_box(&nodes), cfg.tx_range).unwrap())
        });
    }
    group.finish();
}

fn dunn(c: &mut Criterion) {
    let mut group = c.benchmark_group("dunn_index");
    for n in [50usize, 300] {
        let cfg = config(n);
        let nodes = generate_scenario(&cfg).unwrap();
        let set = expac_cluster(&nodes, cfg.tx_range).unwrap();
        let positions: Vec<Position> = nodes.iter().map(|n| n.pos).collect();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| dunn_index(black_box(&set), &positions).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pipeline, expac, dunn);
criterion_main!(benches);
