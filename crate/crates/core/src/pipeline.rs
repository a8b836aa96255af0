//! End-to-end layout algorithms: force-directed placement from the planarity
//! enhancer, realizer embedding, and DimFlux (embedding, projection onto the
//! additive space, force-directed refinement). Also batch evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::additive::{AdditiveBasis, ElementVectors, RepresentationKind};
use crate::diagram::{conflict_distance, non_incident_pairs, norm, sub, quality_metrics, validate_line_diagram, Layout, LayoutJson, QualityMetrics, ValidityReport};
use crate::dimdraw::{minimal_extension, realizer_embed, rotate_stretch, ExtensionBudget, ExtensionResult};
use crate::error::{Error, Result};
use crate::forces::{initialize_vectors, optimize_with_progress, planarity_enhancer, ForceConfig, ForceMode, TraceRow};
use crate::lattice::ConceptLattice;

/// Tolerance for the additivity of produced layouts.
pub const ADDITIVE_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    AttrFdp,
    DoublyFdp,
    Dimdraw,
    Dimflux,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::AttrFdp, Algorithm::DoublyFdp, Algorithm::Dimdraw, Algorithm::Dimflux];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::AttrFdp => "attr-fdp",
            Algorithm::DoublyFdp => "doubly-fdp",
            Algorithm::Dimdraw => "dimdraw",
            Algorithm::Dimflux => "dimflux",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm `{s}` (expected attr-fdp, doubly-fdp, dimdraw or dimflux)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub forces: ForceConfig,
    pub extension: ExtensionBudget,
    /// Seeds the jitter used to separate a node lying on an edge.
    pub seed: u64,
    /// Smallest node/node and node/edge distance accepted as valid.
    pub min_gap: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            forces: ForceConfig::default(),
            extension: ExtensionBudget::default(),
            seed: 0,
            min_gap: 1e-6,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.forces.validate()?;
        if !(self.min_gap >= 0.0 && self.min_gap.is_finite()) {
            return Err(Error::Config(format!("min_gap must be non-negative, got {}", self.min_gap)));
        }
        if let Some(s) = self.extension.max_seconds {
            if !(s > 0.0) {
                return Err(Error::Config(format!("extension.max_seconds must be positive, got {s}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Stages {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedded: Option<Layout>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projected: Option<Layout>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<Layout>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StageMetrics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedded: Option<QualityMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projected: Option<QualityMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refined: Option<QualityMetrics>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PipelineResult {
    pub algorithm: Algorithm,
    pub stages: Stages,
    /// The last stage produced.
    pub layout: Layout,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extension: Option<ExtensionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vectors: Option<ElementVectors>,
    pub metrics: StageMetrics,
    pub validity: ValidityReport,
    /// Max-abs distance of `layout` from the doubly-additive space.
    pub additive_residual: f64,
    pub converged: bool,
    /// `false` if the extension budget ran out before minimality was proven.
    pub extension_minimal: bool,
    /// Whether the vectors had to be lifted or jittered before refinement.
    pub repaired: bool,
    pub iterations: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub trace: Vec<TraceRow>,
}

impl PipelineResult {
    /// Non-convergence or an exhausted extension budget.
    pub fn flagged(&self) -> bool {
        !self.converged || !self.extension_minimal
    }
}

/// Lifts every vector by `(0, λ)` so each cover rises, then jitters the
/// vectors until no node lies on a non-incident edge or another node.
fn repair(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    vecs: &mut ElementVectors,
    mode: ForceMode,
    rng: &mut ChaCha8Rng,
) -> Result<bool> {
    let mut repaired = false;
    let variable: Vec<bool> = vecs.elements.iter().map(|&e| mode.is_variable(e)).collect();
    for (v, &var) in vecs.vectors.iter_mut().zip(&variable) {
        if !var {
            *v = [0.0, 0.0];
        }
    }
    let layout = basis.positions_from_vectors(vecs)?;
    let srm = basis.srm();
    let scale = {
        let (lo, hi) = layout.bounds();
        (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0)
    };
    let margin = 0.05 * scale / (lat.len().max(2) as f64);
    let mut lambda: f64 = 0.0;
    for &(lo, hi) in lat.covers() {
        let gained = basis
            .elements()
            .iter()
            .enumerate()
            .filter(|&(s, &e)| srm[hi][s] == 1 && srm[lo][s] == 0 && mode.is_variable(e))
            .count()
            .max(1) as f64;
        let rise = layout.points[hi][1] - layout.points[lo][1];
        if rise < margin {
            lambda = lambda.max((margin - rise) / gained);
        }
    }
    if lambda > 0.0 {
        for (v, _) in vecs.vectors.iter_mut().zip(&variable).filter(|(_, &var)| var) {
            v[1] += lambda;
        }
        repaired = true;
    }

    for _ in 0..100 {
        let p = basis.positions_from_vectors(vecs)?.points;
        let touch = 1e-6 * scale;
        let touching = (0..p.len()).any(|i| (i + 1..p.len()).any(|j| norm(sub(p[i], p[j])) <= touch))
            || non_incident_pairs(lat).any(|(v, lo, hi)| conflict_distance(p[v], p[lo], p[hi]).map_or(true, |d| d <= touch));
        if !touching {
            break;
        }
        for (v, _) in vecs.vectors.iter_mut().zip(&variable).filter(|(_, &var)| var) {
            v[0] += rng.random_range(-1.0..1.0) * margin;
        }
        repaired = true;
    }
    Ok(repaired)
}

fn metrics(lat: &ConceptLattice, layout: &Layout) -> Option<QualityMetrics> {
    quality_metrics(lat, layout).ok()
}

struct Refined {
    vectors: ElementVectors,
    layout: Layout,
    converged: bool,
    iterations: usize,
    trace: Vec<TraceRow>,
    repaired: bool,
}

fn refine(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    mut vecs: ElementVectors,
    mode: ForceMode,
    cfg: &PipelineConfig,
    progress: &mut dyn FnMut(&TraceRow),
) -> Result<Refined> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let repaired = repair(lat, basis, &mut vecs, mode, &mut rng)?;
    let r = optimize_with_progress(lat, basis, &vecs, mode, &cfg.forces, progress)?;
    Ok(Refined {
        vectors: r.vectors,
        layout: r.layout,
        converged: r.converged,
        iterations: r.iterations,
        trace: r.trace,
        repaired,
    })
}

/// Runs `algo` on `lat`, reporting optimizer iterations to `progress`.
pub fn run_with_progress(
    lat: &ConceptLattice,
    algo: Algorithm,
    cfg: &PipelineConfig,
    progress: &mut dyn FnMut(&TraceRow),
) -> Result<PipelineResult> {
    cfg.validate()?;
    let basis = AdditiveBasis::build(lat, RepresentationKind::DoublyAdditive);
    let mut stages = Stages::default();
    let mut stage_metrics = StageMetrics::default();
    let mut extension = None;
    let mut extension_minimal = true;
    let mut vectors = None;
    let (mut converged, mut iterations, mut repaired, mut trace) = (true, 0, false, Vec::new());

    match algo {
        Algorithm::AttrFdp | Algorithm::DoublyFdp => {
            let mode = if algo == Algorithm::AttrFdp { ForceMode::AttributeAdditive } else { ForceMode::DoublyAdditive };
            let order = planarity_enhancer(lat, mode, &cfg.forces).order;
            let vecs0 = initialize_vectors(lat, &order, mode, &cfg.forces);
            let r = refine(lat, &basis, vecs0, mode, cfg, progress)?;
            stage_metrics.refined = metrics(lat, &r.layout);
            stages.refined = Some(r.layout);
            vectors = Some(r.vectors);
            (converged, iterations, repaired, trace) = (r.converged, r.iterations, r.repaired, r.trace);
        }
        Algorithm::Dimdraw | Algorithm::Dimflux => {
            let ext = minimal_extension(&lat.order_matrix(), &cfg.extension);
            extension_minimal = ext.minimal;
            let embedded = rotate_stretch(&realizer_embed(&ext.realizer));
            stage_metrics.embedded = metrics(lat, &embedded);
            stages.embedded = Some(embedded.clone());
            extension = Some(ext);
            if algo == Algorithm::Dimflux {
                let projected = if basis.is_additive(&embedded, 1e-9)?.additive {
                    embedded.clone()
                } else {
                    basis.project_affine(&embedded)?
                };
                stage_metrics.projected = metrics(lat, &projected);
                let (vecs0, _) = basis.recover_vectors(&projected)?;
                stages.projected = Some(projected);
                let r = refine(lat, &basis, vecs0, ForceMode::DoublyAdditive, cfg, progress)?;
                stage_metrics.refined = metrics(lat, &r.layout);
                stages.refined = Some(r.layout);
                vectors = Some(r.vectors);
                (converged, iterations, repaired, trace) = (r.converged, r.iterations, r.repaired, r.trace);
            }
        }
    }

    let layout = stages
        .refined
        .clone()
        .or_else(|| stages.projected.clone())
        .or_else(|| stages.embedded.clone())
        .unwrap_or_else(|| Layout::zeros(lat.len()));
    let validity = validate_line_diagram(lat, &layout, 0.0, cfg.min_gap)?;
    let additive_residual = basis.is_additive(&layout, ADDITIVE_TOL)?.residual;
    Ok(PipelineResult {
        algorithm: algo,
        stages,
        layout,
        extension,
        vectors,
        metrics: stage_metrics,
        validity,
        additive_residual,
        converged,
        extension_minimal,
        repaired,
        iterations,
        trace,
    })
}

pub fn run(lat: &ConceptLattice, algo: Algorithm, cfg: &PipelineConfig) -> Result<PipelineResult> {
    run_with_progress(lat, algo, cfg, &mut |_| {})
}

/// Extension, realizer embedding, projection and doubly-additive refinement.
pub fn dimflux(ctx: &crate::context::FormalContext, cfg: &PipelineConfig) -> Result<PipelineResult> {
    run(&ConceptLattice::from_context(ctx), Algorithm::Dimflux, cfg)
}

/// Planarity enhancer, initialization and optimization in `mode`.
pub fn force_directed_pipeline(ctx: &crate::context::FormalContext, mode: ForceMode, cfg: &PipelineConfig) -> Result<PipelineResult> {
    let algo = match mode {
        ForceMode::AttributeAdditive => Algorithm::AttrFdp,
        ForceMode::DoublyAdditive => Algorithm::DoublyFdp,
    };
    run(&ConceptLattice::from_context(ctx), algo, cfg)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub lattice: String,
    pub algorithm: Algorithm,
    pub concepts: usize,
    pub valid: bool,
    pub additive: bool,
    pub converged: bool,
    pub extension_minimal: bool,
    pub repaired: bool,
    pub iterations: usize,
    pub min_conflict_distance: Option<f64>,
    pub edge_crossings: Option<usize>,
    pub distinct_slopes: Option<usize>,
    pub reference_distance: Option<f64>,
    pub reference_distance_normalized: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmSummary {
    pub runs: usize,
    pub valid: usize,
    pub additive: usize,
    pub converged: usize,
    pub errors: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationTable {
    pub rows: Vec<EvaluationRow>,
    pub summary: BTreeMap<Algorithm, AlgorithmSummary>,
}

impl EvaluationTable {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A lattice with an identifier for evaluation.
#[derive(Clone, Debug)]
pub struct NamedLattice {
    pub id: String,
    pub lattice: ConceptLattice,
}

fn evaluate_one(
    item: &NamedLattice,
    algo: Algorithm,
    cfg: &PipelineConfig,
    reference: Option<&LayoutJson>,
) -> EvaluationRow {
    let mut row = EvaluationRow {
        lattice: item.id.clone(),
        algorithm: algo,
        concepts: item.lattice.len(),
        valid: false,
        additive: false,
        converged: false,
        extension_minimal: false,
        repaired: false,
        iterations: 0,
        min_conflict_distance: None,
        edge_crossings: None,
        distinct_slopes: None,
        reference_distance: None,
        reference_distance_normalized: None,
        error: None,
    };
    let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(&item.lattice, algo, cfg)));
    let result = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            row.error = Some(e.to_string());
            return row;
        }
        Err(_) => {
            row.error = Some("internal panic".into());
            return row;
        }
    };
    row.valid = result.validity.valid;
    row.additive = result.additive_residual <= ADDITIVE_TOL;
    row.converged = result.converged;
    row.extension_minimal = result.extension_minimal;
    row.repaired = result.repaired;
    row.iterations = result.iterations;
    if let Ok(m) = quality_metrics(&item.lattice, &result.layout) {
        row.min_conflict_distance = Some(m.min_conflict_distance);
        row.edge_crossings = Some(m.edge_crossings);
        row.distinct_slopes = Some(m.distinct_slopes);
    }
    if let Some(reference) = reference {
        match reference.to_layout(&item.lattice) {
            Ok(r) => {
                row.reference_distance = crate::diagram::layout_distance(&result.layout, &r, false).ok();
                row.reference_distance_normalized = crate::diagram::layout_distance(&result.layout, &r, true).ok();
            }
            Err(e) => row.error = Some(format!("reference layout: {e}")),
        }
    }
    row
}

/// Runs every algorithm on every lattice in parallel. Failures are recorded
/// in their row and never abort the batch. `references` maps lattice ids to
/// reference layouts.
pub fn batch_evaluate(
    lattices: &[NamedLattice],
    algorithms: &[Algorithm],
    cfg: &PipelineConfig,
    references: &BTreeMap<String, LayoutJson>,
) -> EvaluationTable {
    let jobs: Vec<(usize, Algorithm)> = (0..lattices.len())
        .flat_map(|i| algorithms.iter().map(move |&a| (i, a)))
        .collect();
    let rows: Vec<EvaluationRow> = jobs
        .par_iter()
        .map(|&(i, a)| evaluate_one(&lattices[i], a, cfg, references.get(&lattices[i].id)))
        .collect();
    let mut summary: BTreeMap<Algorithm, AlgorithmSummary> = BTreeMap::new();
    for row in &rows {
        let s = summary.entry(row.algorithm).or_default();
        s.runs += 1;
        s.valid += usize::from(row.valid);
        s.additive += usize::from(row.additive);
        s.converged += usize::from(row.converged);
        s.errors += usize::from(row.error.is_some());
    }
    EvaluationTable { rows, summary }
}

/// The 126 catalog lattices under their stable identifiers.
pub fn catalog_lattices() -> Vec<NamedLattice> {
    crate::catalog::enumerate_four_meet_irreducible_lattices()
        .into_iter()
        .map(|e| NamedLattice { id: e.id, lattice: e.lattice })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
            assert_eq!(serde_json::to_string(&a).unwrap(), format!("\"{}\"", a.name()));
        }
        assert!("spring".parse::<Algorithm>().is_err());
    }

    #[test]
    fn grid_embedding_is_not_moved_by_projection() {
        let r = dimflux(&examples::contranominal(2), &PipelineConfig::default()).unwrap();
        let (e, p) = (r.stages.embedded.unwrap(), r.stages.projected.unwrap());
        assert!(e.max_abs_diff(&p) <= 1e-9);
    }

    #[test]
    fn dwarf_planets_dimflux_is_valid_and_additive() {
        let r = dimflux(&examples::dwarf_planets(), &PipelineConfig::default()).unwrap();
        assert!(r.validity.valid, "{:?}", r.validity);
        assert!(r.additive_residual <= ADDITIVE_TOL);
        assert!(r.validity.min_conflict_distance > 0.0);
    }

    #[test]
    fn two_chain_fdp_is_valid() {
        for mode in [ForceMode::AttributeAdditive, ForceMode::DoublyAdditive] {
            let r = force_directed_pipeline(&examples::two_chain(), mode, &PipelineConfig::default()).unwrap();
            assert!(r.validity.valid);
        }
    }

    #[test]
    fn empty_algorithm_list_gives_empty_table() {
        let lats = vec![NamedLattice { id: "n5".into(), lattice: ConceptLattice::from_context(&examples::n5()) }];
        let t = batch_evaluate(&lats, &[], &PipelineConfig::default(), &BTreeMap::new());
        assert!(t.rows.is_empty());
        let t = batch_evaluate(&lats, &Algorithm::ALL, &PipelineConfig::default(), &BTreeMap::new());
        assert_eq!(t.rows.len(), 4);
    }

    #[test]
    fn m4_atoms_level_out() {
        let lat = ConceptLattice::from_context(&examples::m_n(4));
        let r = run(&lat, Algorithm::DoublyFdp, &PipelineConfig::default()).unwrap();
        assert!(r.converged);
        let ys: Vec<f64> = (0..lat.len())
            .filter(|&c| c != lat.top() && c != lat.bottom())
            .map(|c| r.layout.points[c][1])
            .collect();
        let spread = ys.iter().cloned().fold(f64::MIN, f64::max) - ys.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 0.05, "{ys:?}");
    }
}
