//! Polak–Ribière conjugate gradient over the element vectors with an Armijo
//! backtracking line search.

use serde::{Deserialize, Serialize};

use crate::additive::{AdditiveBasis, ElementVectors};
use crate::diagram::{conflict_distance, norm, sub, Layout, Point};
use crate::error::Result;
use crate::lattice::ConceptLattice;

use super::{Evaluation, ForceConfig, ForceMode, ForceModel};

const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 40;
const MAX_FAILURES: usize = 20;
/// Largest node displacement per step as a fraction of the closest
/// node/node or node/edge distance, so no node can pass through an edge.
const SAFE_FRACTION: f64 = 0.45;
/// Accepted steps in a row with negligible energy change before giving up.
const STALL_STEPS: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub e_rep: f64,
    pub e_att: f64,
    pub e_grav: f64,
    pub force_inf: f64,
}

#[derive(Clone, Debug)]
pub struct OptimizeResult {
    pub vectors: ElementVectors,
    pub layout: Layout,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TraceRow>,
}

fn row(iteration: usize, ev: &Evaluation) -> TraceRow {
    TraceRow {
        iteration,
        e_rep: ev.e_rep,
        e_att: ev.e_att,
        e_grav: ev.e_grav,
        force_inf: ev.force_inf(),
    }
}

fn dot_all(a: &[Point], b: &[Point]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x[0] * y[0] + x[1] * y[1]).sum()
}

fn clearance(lat: &ConceptLattice, p: &[Point]) -> f64 {
    let mut m = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            m = m.min(norm(sub(p[i], p[j])));
        }
    }
    for (v, lo, hi) in crate::diagram::non_incident_pairs(lat) {
        m = m.min(conflict_distance(p[v], p[lo], p[hi]).unwrap_or(0.0));
    }
    m
}

/// Minimizes the weighted energy starting from `vecs0`. Steps that raise a
/// previously rising cover to non-rising, or that move any node by more than
/// a safe fraction of the current clearance, are rejected like steps that
/// fail the sufficient-decrease test. Stops unconverged when the energy stops
/// changing while the force is still above tolerance.
pub fn optimize(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    vecs0: &ElementVectors,
    mode: ForceMode,
    cfg: &ForceConfig,
) -> Result<OptimizeResult> {
    optimize_with_progress(lat, basis, vecs0, mode, cfg, &mut |_| {})
}

/// [`optimize`] reporting every accepted iteration to `progress`.
pub fn optimize_with_progress(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    vecs0: &ElementVectors,
    mode: ForceMode,
    cfg: &ForceConfig,
    progress: &mut dyn FnMut(&TraceRow),
) -> Result<OptimizeResult> {
    cfg.validate()?;
    let model = ForceModel::new(lat, basis, mode, cfg);
    let mut x = vecs0.clone();
    for (v, &e) in x.vectors.iter_mut().zip(&vecs0.elements) {
        if !mode.is_variable(e) {
            *v = [0.0, 0.0];
        }
    }
    let mut ev = model.evaluate(&x)?;
    let mut trace = vec![row(0, &ev)];
    let variables = x.elements.iter().filter(|&&e| mode.is_variable(e)).count().max(1);

    let mut dir: Vec<Point> = ev.gradient.iter().map(|g| [-g[0], -g[1]]).collect();
    let mut alpha = f64::NAN;
    let mut failures = 0;
    let mut iterations = 0;
    let mut converged = ev.force_inf() < cfg.convergence_tol;
    let mut stalled = 0;

    while !converged && iterations < cfg.max_iterations {
        let mut slope = dot_all(&ev.gradient, &dir);
        if slope >= 0.0 {
            dir = ev.gradient.iter().map(|g| [-g[0], -g[1]]).collect();
            slope = dot_all(&ev.gradient, &dir);
        }
        let dir_inf = dir.iter().flat_map(|d| [d[0].abs(), d[1].abs()]).fold(0.0, f64::max);
        if dir_inf == 0.0 {
            converged = true;
            break;
        }
        let step_cap = cfg.initial_step / dir_inf;
        let mut t = if alpha.is_finite() { (alpha * 2.0).min(step_cap * 1e3) } else { step_cap };

        let p0 = &ev.layout.points;
        let max_move = SAFE_FRACTION * clearance(lat, p0);
        let rising: Vec<bool> = lat.covers().iter().map(|&(lo, hi)| p0[hi][1] > p0[lo][1]).collect();

        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let mut trial = x.clone();
            for ((v, d), &e) in trial.vectors.iter_mut().zip(&dir).zip(&x.elements) {
                if mode.is_variable(e) {
                    v[0] += t * d[0];
                    v[1] += t * d[1];
                }
            }
            let layout = basis.positions_from_vectors(&trial)?;
            let p1 = &layout.points;
            let moved = p0.iter().zip(p1).map(|(a, b)| norm(sub(*a, *b))).fold(0.0, f64::max);
            let keeps_order = lat
                .covers()
                .iter()
                .zip(&rising)
                .all(|(&(lo, hi), &r)| !r || p1[hi][1] > p1[lo][1]);
            if moved <= max_move && keeps_order {
                if let Ok(next) = model.evaluate(&trial) {
                    if next.total <= ev.total + ARMIJO * t * slope {
                        accepted = Some((trial, next));
                        break;
                    }
                }
            }
            t *= 0.5;
        }

        iterations += 1;
        match accepted {
            Some((trial, next)) => {
                failures = 0;
                alpha = t;
                let restart = iterations % variables == 0;
                let beta = if restart {
                    0.0
                } else {
                    let num: f64 = next
                        .gradient
                        .iter()
                        .zip(&ev.gradient)
                        .map(|(gn, go)| gn[0] * (gn[0] - go[0]) + gn[1] * (gn[1] - go[1]))
                        .sum();
                    let den = dot_all(&ev.gradient, &ev.gradient);
                    if den > 0.0 { (num / den).max(0.0) } else { 0.0 }
                };
                dir = next
                    .gradient
                    .iter()
                    .zip(&dir)
                    .map(|(g, d)| [-g[0] + beta * d[0], -g[1] + beta * d[1]])
                    .collect();
                let change = (ev.total - next.total).abs();
                stalled = if change <= 1e-14 * ev.total.abs().max(1.0) { stalled + 1 } else { 0 };
                x = trial;
                ev = next;
                trace.push(row(iterations, &ev));
                progress(&trace[trace.len() - 1]);
                converged = ev.force_inf() < cfg.convergence_tol;
                if stalled >= STALL_STEPS {
                    // pinned against the cover-rise or clearance guard
                    break;
                }
            }
            None => {
                failures += 1;
                alpha = t;
                dir = ev.gradient.iter().map(|g| [-g[0], -g[1]]).collect();
                if failures >= MAX_FAILURES {
                    break;
                }
            }
        }
    }

    Ok(OptimizeResult {
        layout: ev.layout.clone(),
        vectors: x,
        iterations,
        converged,
        trace,
    })
}
