//! Inputs shared by the benchmarks.

use latflux_core::{examples, ConceptLattice, FormalContext, Layout};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random context with `g` objects, `m` attributes and incidence density `p`.
pub fn random_context(g: usize, m: usize, p: f64, seed: u64) -> FormalContext {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FormalContext::new(
        (0..g).map(|i| format!("g{i}")).collect(),
        (0..m).map(|i| format!("m{i}")).collect(),
        (0..g).map(|_| (0..m).map(|_| rng.random_bool(p)).collect()).collect(),
    )
    .expect("generated names are distinct")
}

pub fn dwarf_planets() -> ConceptLattice {
    ConceptLattice::from_context(&examples::dwarf_planets())
}

/// Uniform random coordinates in `[-5, 5)²` for every concept.
pub fn random_layout(lat: &ConceptLattice, seed: u64) -> Layout {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Layout::new((0..lat.len()).map(|_| [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)]).collect())
}
