use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use latflux_bench::{dwarf_planets, random_layout};
use latflux_core::forces::{initialize_vectors, optimize, planarity_enhancer};
use latflux_core::pipeline::run;
use latflux_core::{AdditiveBasis, Algorithm, ForceConfig, ForceMode, PipelineConfig, RepresentationKind};

fn projection(c: &mut Criterion) {
    let lat = dwarf_planets();
    let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
    let layout = random_layout(&lat, 1);
    c.bench_function("additive/build_basis", |b| {
        b.iter(|| AdditiveBasis::build(black_box(&lat), RepresentationKind::DoublyAdditive))
    });
    c.bench_function("additive/project", |b| b.iter(|| basis.project(black_box(&layout)).unwrap()));
    c.bench_function("additive/project_framed", |b| b.iter(|| basis.project_framed(black_box(&layout)).unwrap()));
}

fn force_optimization(c: &mut Criterion) {
    let lat = dwarf_planets();
    let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
    let cfg = ForceConfig::default();
    let mode = ForceMode::DoublyAdditive;
    let order = planarity_enhancer(&lat, mode, &cfg).order;
    let start = initialize_vectors(&lat, &order, mode, &cfg);
    let mut group = c.benchmark_group("forces");
    group.sample_size(20);
    group.bench_function("optimize/doubly", |b| {
        b.iter(|| optimize(&lat, &basis, black_box(&start), mode, &cfg).unwrap())
    });
    group.finish();
}

fn pipelines(c: &mut Criterion) {
    let lat = dwarf_planets();
    let cfg = PipelineConfig::default();
    let mut group = c.benchmark_group("pipeline");
    group.sample_size(10);
    for algo in Algorithm::ALL {
        group.bench_function(algo.name(), |b| b.iter(|| run(black_box(&lat), algo, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, projection, force_optimization, pipelines);
criterion_main!(benches);
