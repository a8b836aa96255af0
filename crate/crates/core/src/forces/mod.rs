//! Force-directed refinement of element vectors: Sup-Inf initialization,
//! the repulsive, attractive and gravitational energies, and a
//! conjugate-gradient optimizer.
//!
//! Two vector conventions are in use. [`ElementVectors`] stores `VEC(s)`, the
//! summands of the set representation; in the doubly-additive representation
//! every element moves its concepts upward, so all `VEC(s)` of a valid
//! diagram point up. The drawing vector `n = MOD(e)·VEC(e)` points up for
//! objects and down for attributes. Forces returned by the public functions
//! act on drawing vectors.

mod energy;
mod init;
mod optimize;
mod supinf;

pub use energy::{
    attractive_energy, attractive_force, attractive_position_gradient, gravitational_energy,
    gravitational_force, gravity_term, repulsive_energy, repulsive_force, repulsive_position_gradient,
    safe_zone_angle, Evaluation, ForceModel,
};
pub use init::initialize_vectors;
pub use optimize::{optimize, optimize_with_progress, OptimizeResult, TraceRow};
pub use supinf::{planarity_enhancer, sup_inf_distance, sup_inf_raw, EnhancerResult};

use serde::{Deserialize, Serialize};

use crate::additive::{Element, ElementVectors};
use crate::context::FormalContext;
use crate::diagram::Point;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForceMode {
    /// Only attribute vectors are variables; object vectors stay zero.
    AttributeAdditive,
    /// All object and attribute vectors are variables.
    DoublyAdditive,
}

impl ForceMode {
    pub fn is_variable(self, e: Element) -> bool {
        match self {
            ForceMode::AttributeAdditive => !e.is_object(),
            ForceMode::DoublyAdditive => true,
        }
    }

    pub fn variables(self, ctx: &FormalContext) -> Vec<Element> {
        crate::additive::RepresentationKind::DoublyAdditive
            .elements(ctx)
            .into_iter()
            .filter(|&e| self.is_variable(e))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForceConfig {
    pub max_iterations: usize,
    /// Convergence threshold on the infinity norm of the total force.
    pub convergence_tol: f64,
    /// Largest component change of any vector in the first trial step.
    pub initial_step: f64,
    pub w_rep: f64,
    pub w_att: f64,
    pub w_grav: f64,
    /// Parabola `y = a·x² + c` for the initial atom/coatom vectors.
    pub parabola_a: f64,
    pub parabola_c: f64,
    /// Horizontal spacing of neighbouring parabola vectors.
    pub spacing: f64,
    /// Magnitude of the shift separating elements with equal neighbour sets.
    pub shift: f64,
}

impl Default for ForceConfig {
    fn default() -> Self {
        Self {
            max_iterations: 2000,
            convergence_tol: 1e-4,
            initial_step: 0.05,
            w_rep: 1.0,
            w_att: 1.0,
            w_grav: 1.0,
            parabola_a: 0.09,
            parabola_c: 1.75,
            spacing: 1.8,
            shift: 0.1,
        }
    }
}

impl ForceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("convergence_tol", self.convergence_tol),
            ("initial_step", self.initial_step),
            ("parabola_c", self.parabola_c),
            ("spacing", self.spacing),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        let non_negative = [
            ("w_rep", self.w_rep),
            ("w_att", self.w_att),
            ("w_grav", self.w_grav),
            ("parabola_a", self.parabola_a),
            ("shift", self.shift),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be non-negative, got {v}")));
            }
        }
        Ok(())
    }
}

/// Writes an energy trace as CSV (`iteration,e_rep,e_att,e_grav,force_inf`).
pub fn write_trace_csv<W: std::io::Write>(trace: &[TraceRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trace {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn to_drawing(vecs: &ElementVectors, forces_on_vec: &[Point]) -> Vec<Point> {
    vecs.elements
        .iter()
        .zip(forces_on_vec)
        .map(|(e, f)| [f[0] * e.mode_sign(), f[1] * e.mode_sign()])
        .collect()
}
