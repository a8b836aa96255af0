//! Sup-Inf distances between elements and the planarity enhancer deriving a
//! linear element order from them.

use crate::additive::Element;
use crate::diagram::{dot, norm, sub, Point};
use crate::lattice::ConceptLattice;

use super::{ForceConfig, ForceMode};

fn concept_of(lat: &ConceptLattice, e: Element) -> usize {
    match e {
        Element::Object(g) => lat.object_concept(g),
        Element::Attribute(m) => lat.attribute_concept(m),
    }
}

/// The unclamped Sup-Inf value; `0` for comparable concepts. The mixed
/// object/attribute case can be negative.
pub fn sup_inf_raw(lat: &ConceptLattice, ei: Element, ej: Element) -> i64 {
    let (ci, cj) = (concept_of(lat, ei), concept_of(lat, ej));
    if lat.comparable(ci, cj) {
        return 0;
    }
    let ctx = lat.context();
    let (a, b) = (lat.concept(ci), lat.concept(cj));
    let ext_meet = a.extent.intersection(&b.extent).len() as i64;
    let int_meet = a.intent.intersection(&b.intent).len() as i64;
    let ext_join = ctx.close_extent(&a.extent.union(&b.extent)).len() as i64;
    let int_join = ctx.close_intent(&a.intent.union(&b.intent)).len() as i64;
    match (ei.is_object(), ej.is_object()) {
        (true, true) => ext_join - ext_meet - 1,
        (false, false) => int_join - int_meet - 1,
        _ => {
            let delta_meet = ext_meet - int_meet;
            let delta_join = ext_join - int_join;
            delta_meet - delta_join - 1
        }
    }
}

/// Sup-Inf distance used as a spring length; negative mixed values clamp to 0.
pub fn sup_inf_distance(lat: &ConceptLattice, ei: Element, ej: Element) -> f64 {
    sup_inf_raw(lat, ei, ej).max(0) as f64
}

#[derive(Clone, Debug)]
pub struct EnhancerResult {
    /// Variable elements in the derived linear order.
    pub order: Vec<Element>,
    pub positions: Vec<Point>,
    pub initial_energy: f64,
    pub final_energy: f64,
    pub iterations: usize,
    /// Number of element pairs whose negative Sup-Inf value was clamped.
    pub clamped_pairs: usize,
}

fn spring_energy(p: &[Point], d: &[Vec<f64>]) -> f64 {
    let mut e = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let r = norm(sub(p[i], p[j])) - d[i][j];
            e += r * r;
        }
    }
    e
}

/// Deterministic direction for separating coincident points.
fn jitter_direction(i: usize, j: usize) -> Point {
    let angle = (i * 31 + j * 17) as f64 * 2.399_963_229_728_653;
    [angle.cos(), angle.sin()]
}

fn spring_gradient(p: &[Point], d: &[Vec<f64>]) -> Vec<Point> {
    let mut g = vec![[0.0; 2]; p.len()];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let diff = sub(p[i], p[j]);
            let dist = norm(diff);
            let unit = if dist > 0.0 {
                [diff[0] / dist, diff[1] / dist]
            } else {
                jitter_direction(i, j)
            };
            let c = 2.0 * (dist - d[i][j]);
            g[i][0] += c * unit[0];
            g[i][1] += c * unit[1];
            g[j][0] -= c * unit[0];
            g[j][1] -= c * unit[1];
        }
    }
    g
}

/// Relaxes the Sup-Inf spring graph on the variable elements of `mode` from
/// the unit circle and orders the elements along the axis through the two
/// most distant final points.
pub fn planarity_enhancer(lat: &ConceptLattice, mode: ForceMode, cfg: &ForceConfig) -> EnhancerResult {
    let elements = mode.variables(lat.context());
    let n = elements.len();
    let mut clamped_pairs = 0;
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let raw = sup_inf_raw(lat, elements[i], elements[j]);
            if raw < 0 {
                clamped_pairs += 1;
            }
            d[i][j] = raw.max(0) as f64;
            d[j][i] = d[i][j];
        }
    }
    let mut p: Vec<Point> = (0..n)
        .map(|i| {
            let phi = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            [phi.cos(), phi.sin()]
        })
        .collect();
    // separate exact coincidences before relaxing
    for i in 0..n {
        for j in i + 1..n {
            if norm(sub(p[i], p[j])) == 0.0 {
                let u = jitter_direction(i, j);
                p[j][0] += 1e-6 * u[0];
                p[j][1] += 1e-6 * u[1];
            }
        }
    }

    let initial_energy = spring_energy(&p, &d);
    let mut energy = initial_energy;
    let mut step = 0.1;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        let g = spring_gradient(&p, &d);
        let force_inf = g.iter().flat_map(|v| [v[0].abs(), v[1].abs()]).fold(0.0, f64::max);
        if force_inf < cfg.convergence_tol {
            break;
        }
        iterations += 1;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Point> = p
                .iter()
                .zip(&g)
                .map(|(x, gi)| [x[0] - step * gi[0], x[1] - step * gi[1]])
                .collect();
            let e = spring_energy(&trial, &d);
            if e <= energy {
                p = trial;
                energy = e;
                step *= 1.5;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let order = if n < 2 {
        elements.clone()
    } else {
        let (mut a, mut b, mut best) = (0, 1, -1.0);
        for i in 0..n {
            for j in i + 1..n {
                let dist = norm(sub(p[i], p[j]));
                if dist > best + 1e-12 {
                    (a, b, best) = (i, j, dist);
                }
            }
        }
        let axis = sub(p[b], p[a]);
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| {
            let (si, sj) = (dot(sub(p[i], p[a]), axis), dot(sub(p[j], p[a]), axis));
            si.total_cmp(&sj).then(i.cmp(&j))
        });
        idx.into_iter().map(|i| elements[i]).collect()
    };

    EnhancerResult {
        order,
        positions: p,
        initial_energy,
        final_energy: energy,
        iterations,
        clamped_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FormalContext;
    use crate::examples;

    #[test]
    fn comparable_pairs_have_distance_zero() {
        let lat = ConceptLattice::from_context(&examples::chain(4));
        let ctx = lat.context();
        for i in 0..ctx.num_attributes() {
            for j in 0..ctx.num_attributes() {
                assert_eq!(sup_inf_distance(&lat, Element::Attribute(i), Element::Attribute(j)), 0.0);
            }
        }
    }

    #[test]
    fn contranominal_attributes_are_one_apart() {
        let lat = ConceptLattice::from_context(&examples::contranominal(3));
        assert_eq!(sup_inf_distance(&lat, Element::Attribute(0), Element::Attribute(1)), 1.0);
        assert_eq!(sup_inf_distance(&lat, Element::Object(0), Element::Object(2)), 1.0);
    }

    #[test]
    fn dwarf_planet_attributes_by_closure() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let ctx = lat.context();
        let ns = Element::Attribute(ctx.attribute_index("Non-Spherical").unwrap());
        let at = Element::Attribute(ctx.attribute_index("Atmosphere").unwrap());
        // intents {NS} and {At}: closure of the union is {NS, At}, meet is empty
        assert_eq!(sup_inf_distance(&lat, ns, at), 2.0 - 0.0 - 1.0);
    }

    #[test]
    fn single_element_order() {
        let ctx = FormalContext::from_rows(&["m"], &[("g", &[][..])]).unwrap();
        let lat = ConceptLattice::from_context(&ctx);
        let r = planarity_enhancer(&lat, ForceMode::AttributeAdditive, &ForceConfig::default());
        assert_eq!(r.order, vec![Element::Attribute(0)]);
    }

    #[test]
    fn two_springs_relax_to_rest_length() {
        // two incomparable attributes with distance 1
        let lat = ConceptLattice::from_context(&examples::contranominal(2));
        let r = planarity_enhancer(&lat, ForceMode::AttributeAdditive, &ForceConfig::default());
        assert_eq!(r.order.len(), 2);
        assert!((norm(sub(r.positions[0], r.positions[1])) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn relaxation_does_not_raise_energy() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let r = planarity_enhancer(&lat, ForceMode::DoublyAdditive, &ForceConfig::default());
        assert_eq!(r.order.len(), 9);
        assert!(r.final_energy <= r.initial_energy);
    }
}
