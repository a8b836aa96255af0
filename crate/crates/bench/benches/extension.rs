use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use latflux_core::dimdraw::{is_two_dimensional, minimal_extension, ExtensionBudget};
use latflux_core::{examples, ConceptLattice};

fn extensions(c: &mut Criterion) {
    let dwarf = ConceptLattice::from_context(&examples::dwarf_planets()).order_matrix();
    let fm3 = ConceptLattice::from_context(&examples::fm3()).order_matrix();
    let budget = ExtensionBudget::unlimited();
    c.bench_function("dimdraw/two_dimensional/dwarf_planets", |b| b.iter(|| is_two_dimensional(black_box(&dwarf))));
    c.bench_function("dimdraw/minimal_extension/dwarf_planets", |b| {
        b.iter(|| minimal_extension(black_box(&dwarf), &budget))
    });
    let mut group = c.benchmark_group("dimdraw/fm3");
    group.sample_size(10);
    group.bench_function("minimal_extension", |b| b.iter(|| minimal_extension(black_box(&fm3), &budget)));
    group.finish();
}

criterion_group!(benches, extensions);
criterion_main!(benches);
