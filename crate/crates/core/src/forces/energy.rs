//! Energies and their exact gradients.
//!
//! The repulsive and attractive energies are functions of concept positions.
//! Their gradients are formed per concept and pulled back to the element
//! vectors through the SRM: an element moves exactly the concepts whose
//! representation contains it, so `dE/dVEC(s) = Σ_{c : s ∈ REP(c)} dE/dPOS(c)`.
//! This reproduces the per-case contribution tables (elements shifting all
//! three concepts of a node/edge triple cancel out).

use std::f64::consts::PI;

use crate::additive::{AdditiveBasis, Element, ElementVectors};
use crate::context::FormalContext;
use crate::diagram::{conflict_case, cross, dot, sub, ConflictCase, Layout, Point};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

use super::{to_drawing, ForceConfig, ForceMode};

/// Half-angle `φ₀(e)` of the safe zone: `π/(|G|+1)` for objects and
/// `π/(|M|+1)` for attributes.
pub fn safe_zone_angle(ctx: &FormalContext, e: Element) -> f64 {
    match e {
        Element::Object(_) => PI / (ctx.num_objects() as f64 + 1.0),
        Element::Attribute(_) => PI / (ctx.num_attributes() as f64 + 1.0),
    }
}

fn conflict_distance_checked(p: &[Point], v: usize, lo: usize, hi: usize) -> Result<f64> {
    match crate::diagram::conflict_distance(p[v], p[lo], p[hi]) {
        Ok(d) if d > 0.0 && d.is_finite() => Ok(d),
        _ => Err(Error::Singular { node: v, lower: lo, upper: hi }),
    }
}

/// `E_rep = Σ 1/d(w, f)` over all concepts and non-incident cover edges.
pub fn repulsive_energy(lat: &ConceptLattice, layout: &Layout) -> Result<f64> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    let mut e = 0.0;
    for (v, lo, hi) in crate::diagram::non_incident_pairs(lat) {
        e += 1.0 / conflict_distance_checked(p, v, lo, hi)?;
    }
    Ok(e)
}

fn add(acc: &mut Point, v: Point, scale: f64) {
    acc[0] += v[0] * scale;
    acc[1] += v[1] * scale;
}

/// `dE_rep/dPOS(c)` for every concept.
pub fn repulsive_position_gradient(lat: &ConceptLattice, layout: &Layout) -> Result<Vec<Point>> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    let mut g = vec![[0.0; 2]; p.len()];
    for (v, lo, hi) in crate::diagram::non_incident_pairs(lat) {
        let d = conflict_distance_checked(p, v, lo, hi)?;
        let k = -1.0 / (d * d);
        let (w, w1, w2) = (p[v], p[lo], p[hi]);
        match conflict_case(w, w1, w2) {
            ConflictCase::BeforeLower => {
                let u = sub(w, w1);
                add(&mut g[v], u, k / d);
                add(&mut g[lo], u, -k / d);
            }
            ConflictCase::PastUpper => {
                let u = sub(w, w2);
                add(&mut g[v], u, k / d);
                add(&mut g[hi], u, -k / d);
            }
            ConflictCase::Between => {
                let f = sub(w2, w1);
                let len2 = dot(f, f);
                let len = len2.sqrt();
                let l = cross(sub(w1, w), sub(w2, w)).signum();
                // unit normal on the side of w
                let normal = [-f[1] * l / len, f[0] * l / len];
                add(&mut g[v], normal, k);
                add(&mut g[lo], normal, -k * dot(sub(w2, w), f) / len2);
                add(&mut g[hi], normal, -k * dot(sub(w, w1), f) / len2);
            }
        }
    }
    Ok(g)
}

/// `E_att = Σ_{covers} |f|²`.
pub fn attractive_energy(lat: &ConceptLattice, layout: &Layout) -> Result<f64> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    Ok(lat
        .covers()
        .iter()
        .map(|&(lo, hi)| {
            let f = sub(p[hi], p[lo]);
            dot(f, f)
        })
        .sum())
}

pub fn attractive_position_gradient(lat: &ConceptLattice, layout: &Layout) -> Result<Vec<Point>> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    let mut g = vec![[0.0; 2]; p.len()];
    for &(lo, hi) in lat.covers() {
        let f = sub(p[hi], p[lo]);
        add(&mut g[hi], f, 2.0);
        add(&mut g[lo], f, -2.0);
    }
    Ok(g)
}

/// Gravitational energy of one vector `u = VEC(e)` (upper semi-plane is the
/// correct one for every element) and its gradient `dE/du`.
///
/// Inside `[φ₀, π − φ₀]` the energy is zero. Towards the horizontal axis it is
/// the antiderivative of `1 − sin²φ₀ / sin²φ`, vanishing at the zone boundary.
/// In the wrong semi-plane (`y ≤ 0`) it is `y²`.
pub fn gravity_term(u: Point, phi0: f64) -> (f64, Point) {
    if u[1] <= 0.0 {
        return (u[1] * u[1], [0.0, 2.0 * u[1]]);
    }
    let theta = u[1].atan2(u[0]);
    let s0 = phi0.sin().powi(2);
    let cot = |a: f64| a.cos() / a.sin();
    let slope = 1.0 - s0 / theta.sin().powi(2);
    let (e, de_dtheta) = if theta < phi0 {
        (theta + s0 * cot(theta) - phi0 - s0 * cot(phi0), slope)
    } else if theta > PI - phi0 {
        (-theta - s0 * cot(theta) + PI - phi0 - s0 * cot(phi0), -slope)
    } else {
        return (0.0, [0.0, 0.0]);
    };
    let r2 = dot(u, u);
    (e, [-u[1] / r2 * de_dtheta, u[0] / r2 * de_dtheta])
}

fn gravity_angles(ctx: &FormalContext, elements: &[Element], mode: ForceMode) -> Vec<f64> {
    elements
        .iter()
        .map(|&e| if mode.is_variable(e) { safe_zone_angle(ctx, e) } else { 0.0 })
        .collect()
}

pub fn gravitational_energy(ctx: &FormalContext, vecs: &ElementVectors, mode: ForceMode) -> f64 {
    let phi0 = gravity_angles(ctx, &vecs.elements, mode);
    vecs.vectors
        .iter()
        .zip(&phi0)
        .filter(|(_, &a)| a > 0.0)
        .map(|(u, &a)| gravity_term(*u, a).0)
        .sum()
}

/// Gravitational force on each drawing vector.
pub fn gravitational_force(ctx: &FormalContext, vecs: &ElementVectors, mode: ForceMode) -> Vec<Point> {
    let phi0 = gravity_angles(ctx, &vecs.elements, mode);
    let on_vec: Vec<Point> = vecs
        .vectors
        .iter()
        .zip(&phi0)
        .map(|(u, &a)| {
            if a > 0.0 {
                let g = gravity_term(*u, a).1;
                [-g[0], -g[1]]
            } else {
                [0.0, 0.0]
            }
        })
        .collect();
    to_drawing(vecs, &on_vec)
}

fn pull_back(basis: &AdditiveBasis, pos_grad: &[Point], mode: ForceMode) -> Vec<Point> {
    let mut out = vec![[0.0; 2]; basis.elements().len()];
    for (row, g) in basis.srm().iter().zip(pos_grad) {
        for (s, &bit) in row.iter().enumerate() {
            if bit == 1 {
                add(&mut out[s], *g, 1.0);
            }
        }
    }
    for (o, &e) in out.iter_mut().zip(basis.elements()) {
        if !mode.is_variable(e) {
            *o = [0.0, 0.0];
        }
    }
    out
}

fn drawing_forces(basis: &AdditiveBasis, pos_grad: &[Point], mode: ForceMode) -> Vec<Point> {
    pull_back(basis, pos_grad, mode)
        .into_iter()
        .zip(basis.elements())
        .map(|(g, e)| [-g[0] * e.mode_sign(), -g[1] * e.mode_sign()])
        .collect()
}

/// Repulsive force on each drawing vector, aligned with `basis.elements()`.
pub fn repulsive_force(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    layout: &Layout,
    mode: ForceMode,
) -> Result<Vec<Point>> {
    Ok(drawing_forces(basis, &repulsive_position_gradient(lat, layout)?, mode))
}

/// Attractive force on each drawing vector: `2·(w₁ − w₂)·MOD(e)` summed over
/// the covers whose upper representation gains `e`.
pub fn attractive_force(
    lat: &ConceptLattice,
    basis: &AdditiveBasis,
    layout: &Layout,
    mode: ForceMode,
) -> Result<Vec<Point>> {
    Ok(drawing_forces(basis, &attractive_position_gradient(lat, layout)?, mode))
}

/// Energy terms and the gradient of the weighted total with respect to the
/// element vectors (zero on non-variable elements).
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub e_rep: f64,
    pub e_att: f64,
    pub e_grav: f64,
    pub total: f64,
    pub gradient: Vec<Point>,
    pub layout: Layout,
}

impl Evaluation {
    pub fn force_inf(&self) -> f64 {
        self.gradient
            .iter()
            .flat_map(|g| [g[0].abs(), g[1].abs()])
            .fold(0.0, f64::max)
    }
}

/// The weighted three-term energy over one lattice and representation.
pub struct ForceModel<'a> {
    lat: &'a ConceptLattice,
    basis: &'a AdditiveBasis,
    mode: ForceMode,
    weights: [f64; 3],
    phi0: Vec<f64>,
}

impl<'a> ForceModel<'a> {
    pub fn new(lat: &'a ConceptLattice, basis: &'a AdditiveBasis, mode: ForceMode, cfg: &ForceConfig) -> Self {
        Self {
            lat,
            basis,
            mode,
            weights: [cfg.w_rep, cfg.w_att, cfg.w_grav],
            phi0: gravity_angles(lat.context(), basis.elements(), mode),
        }
    }

    pub fn lattice(&self) -> &ConceptLattice {
        self.lat
    }

    pub fn basis(&self) -> &AdditiveBasis {
        self.basis
    }

    pub fn mode(&self) -> ForceMode {
        self.mode
    }

    fn check(&self, vecs: &ElementVectors) -> Result<()> {
        if vecs.elements.as_slice() != self.basis.elements() {
            return Err(Error::LayoutMismatch(
                "element vectors are not aligned with the basis elements".into(),
            ));
        }
        Ok(())
    }

    pub fn evaluate(&self, vecs: &ElementVectors) -> Result<Evaluation> {
        self.check(vecs)?;
        let layout = self.basis.positions_from_vectors(vecs)?;
        let [wr, wa, wg] = self.weights;
        let e_rep = repulsive_energy(self.lat, &layout)?;
        let e_att = attractive_energy(self.lat, &layout)?;
        let mut pos_grad = repulsive_position_gradient(self.lat, &layout)?;
        let att = attractive_position_gradient(self.lat, &layout)?;
        for (g, a) in pos_grad.iter_mut().zip(&att) {
            g[0] = wr * g[0] + wa * a[0];
            g[1] = wr * g[1] + wa * a[1];
        }
        let mut gradient = pull_back(self.basis, &pos_grad, self.mode);
        let mut e_grav = 0.0;
        for ((g, u), &a) in gradient.iter_mut().zip(&vecs.vectors).zip(&self.phi0) {
            if a > 0.0 {
                let (e, d) = gravity_term(*u, a);
                e_grav += e;
                add(g, d, wg);
            }
        }
        Ok(Evaluation {
            e_rep,
            e_att,
            e_grav,
            total: wr * e_rep + wa * e_att + wg * e_grav,
            gradient,
            layout,
        })
    }

    /// Weighted total energy only.
    pub fn energy(&self, vecs: &ElementVectors) -> Result<f64> {
        self.check(vecs)?;
        let layout = self.basis.positions_from_vectors(vecs)?;
        let [wr, wa, wg] = self.weights;
        let grav: f64 = vecs
            .vectors
            .iter()
            .zip(&self.phi0)
            .filter(|(_, &a)| a > 0.0)
            .map(|(u, &a)| gravity_term(*u, a).0)
            .sum();
        Ok(wr * repulsive_energy(self.lat, &layout)? + wa * attractive_energy(self.lat, &layout)? + wg * grav)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::RepresentationKind;
    use crate::diagram::norm;
    use crate::examples;

    #[test]
    fn unit_configuration_contributes_one() {
        // a vertical 3-chain has two node/edge pairs, each at distance 1
        let lat = ConceptLattice::from_context(&examples::chain(3));
        let order = lat.linear_from_bottom();
        let mut pts = vec![[0.0; 2]; 3];
        pts[order[0]] = [0.0, 0.0];
        pts[order[1]] = [0.0, 1.0];
        pts[order[2]] = [0.0, 2.0];
        let e = repulsive_energy(&lat, &Layout::new(pts)).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        assert!(conflict_distance_checked(&[[0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]], 0, 1, 2).unwrap() == 1.0);
    }

    #[test]
    fn two_chain_has_no_repulsion() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
        let layout = Layout::new(vec![[0.0, 1.0], [0.0, 0.0]]);
        assert_eq!(repulsive_energy(&lat, &layout).unwrap(), 0.0);
        let f = repulsive_force(&lat, &basis, &layout, ForceMode::DoublyAdditive).unwrap();
        assert!(f.iter().all(|v| *v == [0.0, 0.0]));
    }

    #[test]
    fn coincident_nodes_have_no_attraction() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        assert_eq!(attractive_energy(&lat, &Layout::zeros(lat.len())).unwrap(), 0.0);
    }

    #[test]
    fn single_edge_of_length_two() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let layout = Layout::new(vec![[0.0, 2.0], [0.0, 0.0]]);
        assert_eq!(attractive_energy(&lat, &layout).unwrap(), 4.0);
    }

    #[test]
    fn zero_force_inside_safe_zone() {
        let ctx = examples::m3();
        let phi0 = safe_zone_angle(&ctx, Element::Attribute(0));
        assert!((phi0 - PI / 4.0).abs() < 1e-15);
        // drawing vector straight down is VEC straight up
        let (e, g) = gravity_term([0.0, 1.0], phi0);
        assert_eq!(e, 0.0);
        assert_eq!(g, [0.0, 0.0]);
    }

    #[test]
    fn wrong_half_plane_is_quadratic() {
        let ctx = examples::dwarf_planets();
        let vecs = ElementVectors {
            elements: vec![Element::Object(0)],
            vectors: vec![[1.0, -0.5]],
            origin: [0.0, 0.0],
        };
        let f = gravitational_force(&ctx, &vecs, ForceMode::DoublyAdditive);
        assert_eq!(f, vec![[0.0, 1.0]]);
        assert_eq!(gravitational_energy(&ctx, &vecs, ForceMode::DoublyAdditive), 0.25);
    }

    #[test]
    fn flat_vector_is_pushed_towards_the_zone() {
        let phi0 = PI / 4.0;
        // flat to the right: force rotates counter-clockwise (towards the zone)
        let (e, g) = gravity_term([1.0, 0.1], phi0);
        assert!(e > 0.0);
        let force = [-g[0], -g[1]];
        assert!(cross([1.0, 0.1], force) > 0.0);
        // flat to the left: clockwise
        let (_, g) = gravity_term([-1.0, 0.1], phi0);
        assert!(cross([-1.0, 0.1], [-g[0], -g[1]]) < 0.0);
        // energy vanishes continuously at the boundary
        let (e, _) = gravity_term([phi0.cos(), phi0.sin() + 1e-12], phi0);
        assert!(e.abs() < 1e-9);
        let (e, _) = gravity_term([-phi0.cos(), phi0.sin() + 1e-12], phi0);
        assert!(e.abs() < 1e-9);
    }

    #[test]
    fn zero_vector_has_zero_gravity() {
        assert_eq!(gravity_term([0.0, 0.0], 0.5), (0.0, [0.0, 0.0]));
    }

    #[test]
    fn singular_configuration_is_reported() {
        let lat = ConceptLattice::from_context(&examples::chain(3));
        let order = lat.linear_from_bottom();
        let mut pts = vec![[0.0; 2]; 3];
        pts[order[0]] = [0.0, 0.0];
        pts[order[1]] = [0.0, 1.0];
        pts[order[2]] = [0.0, 1.0];
        match repulsive_energy(&lat, &Layout::new(pts)) {
            Err(Error::Singular { .. }) => {}
            other => panic!("expected a singularity, got {other:?}"),
        }
        assert!(norm([3.0, 4.0]) == 5.0);
    }
}
