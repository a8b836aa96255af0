//! Initial element vectors: parabola placement for the topmost attributes and
//! bottommost objects, chain means for the rest.

use std::collections::BTreeMap;

use crate::additive::{Element, ElementVectors, RepresentationKind};
use crate::diagram::Point;
use crate::lattice::ConceptLattice;

use super::{ForceConfig, ForceMode};

/// Returns `VEC` for every element of `G ∪̇ M` (objects first). Drawing
/// vectors of the parabola elements are `(x, −a·x² − c)` for attributes and
/// `(x, a·x² + c)` for objects. In attribute mode object vectors are zero.
pub fn initialize_vectors(lat: &ConceptLattice, order: &[Element], mode: ForceMode, cfg: &ForceConfig) -> ElementVectors {
    let ctx = lat.context();
    let elements = RepresentationKind::DoublyAdditive.elements(ctx);
    let mut vecs = ElementVectors::zeros(elements);
    let rank_in_order = |e: Element| order.iter().position(|&x| x == e).unwrap_or(usize::MAX);

    let attrs: Vec<(Element, usize)> = (0..ctx.num_attributes())
        .map(|m| (Element::Attribute(m), lat.attribute_concept(m)))
        .collect();
    let drawing = place_family(lat, &attrs, true, &rank_in_order, cfg);
    for (e, n) in drawing {
        vecs.set(e, [-n[0], -n[1]]);
    }

    if mode == ForceMode::DoublyAdditive {
        let objs: Vec<(Element, usize)> = (0..ctx.num_objects())
            .map(|g| (Element::Object(g), lat.object_concept(g)))
            .collect();
        for (e, n) in place_family(lat, &objs, false, &rank_in_order, cfg) {
            vecs.set(e, n);
        }
    }
    vecs
}

/// Drawing vectors for one family. `downward` selects the attribute case
/// (parabola opening downward, means over elements strictly above).
fn place_family(
    lat: &ConceptLattice,
    family: &[(Element, usize)],
    downward: bool,
    rank_in_order: &dyn Fn(Element) -> usize,
    cfg: &ForceConfig,
) -> Vec<(Element, Point)> {
    // "further from the parabola" relation: strictly above for attributes
    let beyond = |a: usize, b: usize| if downward { lat.lt(a, b) } else { lat.lt(b, a) };
    let mut extreme: Vec<(Element, usize)> = family
        .iter()
        .copied()
        .filter(|&(_, c)| !family.iter().any(|&(_, d)| beyond(c, d)))
        .collect();
    extreme.sort_by_key(|&(e, _)| (rank_in_order(e), e));

    let mut out: Vec<(Element, Point)> = Vec::new();
    let k = extreme.len() as f64;
    for (i, &(e, _)) in extreme.iter().enumerate() {
        let x = (i as f64 - (k - 1.0) / 2.0) * cfg.spacing;
        let y = cfg.parabola_a * x * x + cfg.parabola_c;
        out.push((e, [x, if downward { -y } else { y }]));
    }

    // remaining elements, nearest to the parabola first
    let position: Vec<usize> = {
        let lin = lat.linear_from_bottom();
        let mut pos = vec![0; lat.len()];
        for (i, &c) in lin.iter().enumerate() {
            pos[c] = i;
        }
        pos
    };
    let mut rest: Vec<(Element, usize)> = family
        .iter()
        .copied()
        .filter(|x| !extreme.contains(x))
        .collect();
    rest.sort_by_key(|&(e, c)| {
        let p = if downward { usize::MAX - position[c] } else { position[c] };
        (p, rank_in_order(e), e)
    });

    let sources = |c: usize| -> Vec<usize> {
        family
            .iter()
            .enumerate()
            .filter(|&(_, &(_, d))| beyond(c, d))
            .map(|(i, _)| i)
            .collect()
    };
    let mut groups: BTreeMap<Vec<usize>, Vec<Element>> = BTreeMap::new();
    for &(e, c) in &rest {
        groups.entry(sources(c)).or_default().push(e);
    }
    for members in groups.values_mut() {
        members.sort_by_key(|&e| (rank_in_order(e), e));
    }

    for &(e, c) in &rest {
        let src = sources(c);
        let mut mean = [0.0, 0.0];
        for &i in &src {
            let v = out
                .iter()
                .find(|(x, _)| *x == family[i].0)
                .map(|(_, v)| *v)
                .unwrap_or([0.0, 0.0]);
            mean[0] += v[0] / src.len() as f64;
            mean[1] += v[1] / src.len() as f64;
        }
        let members = &groups[&src];
        if members.len() > 1 {
            let idx = members.iter().position(|&x| x == e).unwrap_or(0) as f64;
            let offset = (idx - (members.len() as f64 - 1.0) / 2.0) * cfg.shift;
            let len = (mean[0] * mean[0] + mean[1] * mean[1]).sqrt();
            let perp = if len > 0.0 { [-mean[1] / len, mean[0] / len] } else { [1.0, 0.0] };
            mean[0] += offset * perp[0];
            mean[1] += offset * perp[1];
        }
        out.push((e, mean));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::FormalContext;
    use crate::examples;

    #[test]
    fn single_attribute_sits_at_the_vertex() {
        let ctx = FormalContext::from_rows::<&str>(&["m"], &[]).unwrap();
        let lat = ConceptLattice::from_context(&ctx);
        let v = initialize_vectors(&lat, &[Element::Attribute(0)], ForceMode::AttributeAdditive, &ForceConfig::default());
        assert_eq!(v.drawing(Element::Attribute(0)), Some([0.0, -1.75]));
    }

    #[test]
    fn two_coatoms_straddle_the_axis() {
        let lat = ConceptLattice::from_context(&examples::contranominal(2));
        let order = [Element::Attribute(0), Element::Attribute(1)];
        let v = initialize_vectors(&lat, &order, ForceMode::AttributeAdditive, &ForceConfig::default());
        let y = -0.09 * 0.81 - 1.75;
        let a = v.drawing(Element::Attribute(0)).unwrap();
        let b = v.drawing(Element::Attribute(1)).unwrap();
        assert!((a[0] + 0.9).abs() < 1e-12 && (a[1] - y).abs() < 1e-12);
        assert!((b[0] - 0.9).abs() < 1e-12 && (b[1] - y).abs() < 1e-12);
        assert!((y + 1.8229).abs() < 1e-12);
        assert_eq!(v.get(Element::Object(0)), Some([0.0, 0.0]));
    }

    #[test]
    fn lower_attribute_takes_the_mean() {
        // m3 below both m1 and m2
        let ctx = FormalContext::from_rows(
            &["m1", "m2", "m3"],
            &[("g1", &["m1"][..]), ("g2", &["m2"][..]), ("g3", &["m1", "m2", "m3"][..])],
        )
        .unwrap();
        let lat = ConceptLattice::from_context(&ctx);
        let order = [Element::Attribute(0), Element::Attribute(1), Element::Attribute(2)];
        let cfg = ForceConfig { shift: 0.0, ..ForceConfig::default() };
        let v = initialize_vectors(&lat, &order, ForceMode::AttributeAdditive, &cfg);
        let y0 = -0.09 * 0.81 - 1.75;
        let c = v.drawing(Element::Attribute(2)).unwrap();
        assert!(c[0].abs() < 1e-12 && (c[1] - y0).abs() < 1e-12);
    }

    #[test]
    fn doubly_mode_places_objects_upward() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let order = ForceMode::DoublyAdditive.variables(lat.context());
        let v = initialize_vectors(&lat, &order, ForceMode::DoublyAdditive, &ForceConfig::default());
        for (e, u) in v.elements.iter().zip(&v.vectors) {
            assert!(u[1] > 0.0, "{e} has VEC {u:?}");
        }
    }
}
