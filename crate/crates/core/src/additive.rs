//! Set representations, the set representation matrix (SRM) and the linear
//! algebra of additive placements: projection, additivity test, recovery of
//! element vectors and snapping to a grid.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::FormalContext;
use crate::diagram::{Layout, Point};
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

/// Residual norm below which a Gram–Schmidt column is treated as dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepresentationKind {
    /// `S = G ∪̇ M`, `REP(A, B) = A ∪ (M ∖ B)`.
    DoublyAdditive,
    /// `S = M`, `REP(A, B) = M ∖ B`.
    AttributeAdditive,
    /// `S = G`, `REP(A, B) = A`.
    ObjectAdditive,
    /// `S = M`, `REP(A, B) = B` (order-reversing).
    DualAttribute,
}

/// An element of `G ∪̇ M`. Objects and attributes live in separate
/// namespaces even when they share a name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Element {
    Object(usize),
    Attribute(usize),
}

impl Element {
    pub fn is_object(self) -> bool {
        matches!(self, Element::Object(_))
    }

    /// `MOD(e)`: `+1` for objects, `-1` for attributes.
    pub fn mode_sign(self) -> f64 {
        match self {
            Element::Object(_) => 1.0,
            Element::Attribute(_) => -1.0,
        }
    }

    pub fn qualified_name(self, ctx: &FormalContext) -> String {
        match self {
            Element::Object(g) => format!("object:{}", ctx.objects()[g]),
            Element::Attribute(m) => format!("attribute:{}", ctx.attributes()[m]),
        }
    }

    pub fn parse_qualified(name: &str, ctx: &FormalContext) -> Result<Self> {
        if let Some(g) = name.strip_prefix("object:") {
            ctx.object_index(g).map(Element::Object)
        } else if let Some(m) = name.strip_prefix("attribute:") {
            ctx.attribute_index(m).map(Element::Attribute)
        } else {
            None
        }
        .ok_or_else(|| Error::UnknownElement(name.to_owned()))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Object(g) => write!(f, "g{g}"),
            Element::Attribute(m) => write!(f, "m{m}"),
        }
    }
}

impl RepresentationKind {
    pub fn elements(self, ctx: &FormalContext) -> Vec<Element> {
        let objects = (0..ctx.num_objects()).map(Element::Object);
        let attributes = (0..ctx.num_attributes()).map(Element::Attribute);
        match self {
            Self::DoublyAdditive => objects.chain(attributes).collect(),
            Self::AttributeAdditive | Self::DualAttribute => attributes.collect(),
            Self::ObjectAdditive => objects.collect(),
        }
    }

    /// Whether `e ∈ REP(extent, intent)`.
    pub fn represents(self, e: Element, extent: &BitSet, intent: &BitSet) -> bool {
        match (self, e) {
            (Self::DoublyAdditive | Self::ObjectAdditive, Element::Object(g)) => extent.contains(g),
            (Self::DoublyAdditive | Self::AttributeAdditive, Element::Attribute(m)) => {
                !intent.contains(m)
            }
            (Self::DualAttribute, Element::Attribute(m)) => intent.contains(m),
            _ => false,
        }
    }
}

/// Vectors `VEC(s)` for every element of `S`, plus a common origin (the
/// position of a concept with empty representation).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ElementVectors {
    pub elements: Vec<Element>,
    pub vectors: Vec<Point>,
    pub origin: Point,
}

impl ElementVectors {
    pub fn zeros(elements: Vec<Element>) -> Self {
        let n = elements.len();
        Self {
            elements,
            vectors: vec![[0.0; 2]; n],
            origin: [0.0; 2],
        }
    }

    pub fn constant(elements: Vec<Element>, v: Point) -> Self {
        let n = elements.len();
        Self {
            elements,
            vectors: vec![v; n],
            origin: [0.0; 2],
        }
    }

    pub fn index_of(&self, e: Element) -> Option<usize> {
        self.elements.iter().position(|&x| x == e)
    }

    pub fn get(&self, e: Element) -> Option<Point> {
        self.index_of(e).map(|i| self.vectors[i])
    }

    pub fn set(&mut self, e: Element, v: Point) {
        if let Some(i) = self.index_of(e) {
            self.vectors[i] = v;
        }
    }

    /// The vector in drawing orientation, `MOD(e)·VEC(e)`: objects point
    /// upward and attributes downward in a valid diagram.
    pub fn drawing(&self, e: Element) -> Option<Point> {
        self.get(e).map(|v| [v[0] * e.mode_sign(), v[1] * e.mode_sign()])
    }

    pub fn is_finite(&self) -> bool {
        self.vectors.iter().chain([&self.origin]).all(|v| v[0].is_finite() && v[1].is_finite())
    }

    pub fn to_named(&self, ctx: &FormalContext) -> BTreeMap<String, Point> {
        self.elements
            .iter()
            .zip(&self.vectors)
            .map(|(e, v)| (e.qualified_name(ctx), *v))
            .collect()
    }
}

/// Result of an additivity test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityCheck {
    pub additive: bool,
    /// Largest absolute coordinate change under projection.
    pub residual: f64,
    /// Euclidean norm of the projection residual in `R^{2|L|}`.
    pub residual_norm: f64,
}

/// The SRM of a lattice together with orthonormal bases of its column space,
/// with and without the all-ones (translation) direction.
#[derive(Clone, Debug)]
pub struct AdditiveBasis {
    kind: RepresentationKind,
    elements: Vec<Element>,
    srm: Vec<Vec<u8>>,
    ortho: Vec<Vec<f64>>,
    ortho_affine: Vec<Vec<f64>>,
    concepts: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Modified Gram–Schmidt with one re-orthogonalization pass; columns whose
/// residual norm drops below [`RANK_TOLERANCE`] are skipped.
fn gram_schmidt(columns: impl IntoIterator<Item = Vec<f64>>, into: &mut Vec<Vec<f64>>) {
    for mut v in columns {
        for _ in 0..2 {
            for q in into.iter() {
                let c = dot(q, &v);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = dot(&v, &v).sqrt();
        if n >= RANK_TOLERANCE {
            v.iter_mut().for_each(|x| *x /= n);
            into.push(v);
        }
    }
}

fn project_column(basis: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for q in basis {
        let c = dot(q, x);
        for (o, qi) in out.iter_mut().zip(q) {
            *o += c * qi;
        }
    }
    out
}

impl AdditiveBasis {
    pub fn build(lat: &ConceptLattice, kind: RepresentationKind) -> Self {
        let elements = kind.elements(lat.context());
        let srm: Vec<Vec<u8>> = lat
            .concepts()
            .iter()
            .map(|c| {
                elements
                    .iter()
                    .map(|&e| kind.represents(e, &c.extent, &c.intent) as u8)
                    .collect()
            })
            .collect();
        let n = lat.len();
        let columns: Vec<Vec<f64>> = (0..elements.len())
            .map(|s| srm.iter().map(|row| row[s] as f64).collect())
            .collect();
        let mut ortho = Vec::new();
        gram_schmidt(columns, &mut ortho);
        let mut ortho_affine = ortho.clone();
        gram_schmidt([vec![1.0; n]], &mut ortho_affine);
        Self {
            kind,
            elements,
            srm,
            ortho,
            ortho_affine,
            concepts: n,
        }
    }

    pub fn kind(&self) -> RepresentationKind {
        self.kind
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn srm(&self) -> &[Vec<u8>] {
        &self.srm
    }

    /// Orthonormal basis of `im(SRM)`.
    pub fn orthonormal_basis(&self) -> &[Vec<f64>] {
        &self.ortho
    }

    pub fn rank(&self) -> usize {
        self.ortho.len()
    }

    pub fn num_concepts(&self) -> usize {
        self.concepts
    }

    pub fn srm_csv(&self, ctx: &FormalContext) -> String {
        let mut out = String::from("concept");
        for e in &self.elements {
            out.push(',');
            out.push_str(&e.qualified_name(ctx));
        }
        out.push('\n');
        for (i, row) in self.srm.iter().enumerate() {
            out.push_str(&i.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }

    fn check(&self, layout: &Layout) -> Result<()> {
        if layout.len() != self.concepts {
            return Err(Error::LayoutMismatch(format!(
                "layout has {} nodes, basis has {} concepts",
                layout.len(),
                self.concepts
            )));
        }
        Ok(())
    }

    /// `POS(c) = origin + Σ_{s ∈ REP(c)} VEC(s)`.
    pub fn positions_from_vectors(&self, vecs: &ElementVectors) -> Result<Layout> {
        let idx: Vec<usize> = self
            .elements
            .iter()
            .map(|&e| vecs.index_of(e).ok_or_else(|| Error::UnknownElement(e.to_string())))
            .collect::<Result<_>>()?;
        Ok(Layout::new(
            self.srm
                .iter()
                .map(|row| {
                    let mut p = vecs.origin;
                    for (s, &bit) in row.iter().enumerate() {
                        if bit == 1 {
                            let v = vecs.vectors[idx[s]];
                            p[0] += v[0];
                            p[1] += v[1];
                        }
                    }
                    p
                })
                .collect(),
        ))
    }

    fn project_with(&self, basis: &[Vec<f64>], layout: &Layout) -> Layout {
        let x = project_column(basis, &layout.column(0));
        let y = project_column(basis, &layout.column(1));
        Layout::from_columns(&x, &y)
    }

    /// Orthogonal projection of both coordinate columns onto `im(SRM)`: the
    /// Euclidean-nearest additive placement.
    pub fn project(&self, layout: &Layout) -> Result<Layout> {
        self.check(layout)?;
        Ok(self.project_with(&self.ortho, layout))
    }

    /// Projection onto `im(SRM) + span(1)`, i.e. additive placements up to
    /// translation.
    pub fn project_affine(&self, layout: &Layout) -> Result<Layout> {
        self.check(layout)?;
        Ok(self.project_with(&self.ortho_affine, layout))
    }

    /// Projects, then rescales uniformly so the diagram keeps its height and
    /// moves it so its bounding-box centre stays put. This is the interactive
    /// redraw used after dragging a node; the result is additive up to
    /// translation.
    pub fn project_framed(&self, layout: &Layout) -> Result<Layout> {
        let projected = self.project(layout)?;
        if layout.is_empty() {
            return Ok(projected);
        }
        let (lo0, hi0) = layout.bounds();
        let (lo1, hi1) = projected.bounds();
        let h0 = hi0[1] - lo0[1];
        let h1 = hi1[1] - lo1[1];
        let scale = if h1 > f64::EPSILON && h0 > f64::EPSILON { h0 / h1 } else { 1.0 };
        let scaled = projected.scaled(scale);
        let (lo2, hi2) = scaled.bounds();
        let shift = [
            (lo0[0] + hi0[0]) / 2.0 - (lo2[0] + hi2[0]) / 2.0,
            (lo0[1] + hi0[1]) / 2.0 - (lo2[1] + hi2[1]) / 2.0,
        ];
        Ok(scaled.translated(shift))
    }

    /// Tests membership in the additive space up to translation: additive
    /// iff no coordinate moves by more than `tol` under projection.
    pub fn is_additive(&self, layout: &Layout, tol: f64) -> Result<AdditivityCheck> {
        let projected = self.project_affine(layout)?;
        let residual = layout.max_abs_diff(&projected);
        let residual_norm = crate::diagram::layout_distance(layout, &projected, false)?;
        Ok(AdditivityCheck {
            additive: residual <= tol,
            residual,
            residual_norm,
        })
    }

    /// Least-squares element vectors (minimum norm among all solutions) and a
    /// free origin. Returns the vectors and the max-abs residual.
    pub fn recover_vectors(&self, layout: &Layout) -> Result<(ElementVectors, f64)> {
        self.check(layout)?;
        let n = self.concepts;
        let k = self.elements.len();
        let mut vecs = ElementVectors::zeros(self.elements.clone());
        if n == 0 {
            return Ok((vecs, 0.0));
        }
        // eliminate the origin by centring rows, then take the pseudo-inverse
        let mut a = DMatrix::<f64>::zeros(n, k);
        for s in 0..k {
            let mean = self.srm.iter().map(|r| r[s] as f64).sum::<f64>() / n as f64;
            for i in 0..n {
                a[(i, s)] = self.srm[i][s] as f64 - mean;
            }
        }
        let centred = |axis: usize| {
            let col = layout.column(axis);
            let mean = col.iter().sum::<f64>() / n as f64;
            DMatrix::from_iterator(n, 1, col.into_iter().map(|v| v - mean))
        };
        if k > 0 {
            let pinv = a
                .svd(true, true)
                .pseudo_inverse(1e-10)
                .map_err(|e| Error::LayoutMismatch(e.to_string()))?;
            for axis in 0..2 {
                let sol = &pinv * centred(axis);
                for s in 0..k {
                    vecs.vectors[s][axis] = sol[(s, 0)];
                }
            }
        }
        let partial = self.positions_from_vectors(&vecs)?;
        for axis in 0..2 {
            vecs.origin[axis] = (0..n)
                .map(|i| layout.points[i][axis] - partial.points[i][axis])
                .sum::<f64>()
                / n as f64;
        }
        let rebuilt = self.positions_from_vectors(&vecs)?;
        Ok((vecs, layout.max_abs_diff(&rebuilt)))
    }

    /// Rounds every element vector (and the origin) to the nearest multiple
    /// of `step` and re-sums. Non-additive input is first projected (keeping
    /// its translation).
    pub fn snap_to_grid(&self, layout: &Layout, step: f64) -> Result<(Layout, ElementVectors)> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!("grid step must be positive, got {step}")));
        }
        let source = if self.is_additive(layout, 1e-6)?.additive {
            layout.clone()
        } else {
            self.project_affine(layout)?
        };
        let (mut vecs, _) = self.recover_vectors(&source)?;
        let snap = |v: f64| (v / step).round() * step;
        for v in vecs.vectors.iter_mut().chain([&mut vecs.origin]) {
            v[0] = snap(v[0]);
            v[1] = snap(v[1]);
        }
        Ok((self.positions_from_vectors(&vecs)?, vecs))
    }
}

/// Whether the vectors place every cover strictly upward:
/// `Σ_{s ∈ REP(c₂) ∖ REP(c₁)} VEC(s)_y > 0` for every cover `c₁ ≺ c₂`.
pub fn validate_vector_cone(lat: &ConceptLattice, basis: &AdditiveBasis, vecs: &ElementVectors) -> bool {
    let ys: Vec<f64> = basis
        .elements()
        .iter()
        .map(|&e| vecs.get(e).map(|v| v[1]).unwrap_or(0.0))
        .collect();
    let height = |c: usize| -> f64 {
        basis.srm()[c]
            .iter()
            .zip(&ys)
            .filter(|(&b, _)| b == 1)
            .map(|(_, y)| y)
            .sum()
    };
    lat.covers().iter().all(|&(lo, hi)| height(hi) - height(lo) > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn dwarf() -> (ConceptLattice, AdditiveBasis) {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
        (lat, basis)
    }

    #[test]
    fn single_concept_srm_is_empty() {
        let lat = ConceptLattice::from_context(&FormalContext::empty());
        let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
        assert_eq!(basis.srm(), &[Vec::<u8>::new()]);
        let p = basis.project(&Layout::new(vec![[3.0, 4.0]])).unwrap();
        assert_eq!(p.points, vec![[0.0, 0.0]]);
    }

    #[test]
    fn two_chain_srm_by_rep_definition() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let basis = AdditiveBasis::build(&lat, RepresentationKind::DoublyAdditive);
        for (i, c) in lat.concepts().iter().enumerate() {
            let expected: Vec<u8> = vec![
                c.extent.contains(0) as u8,
                (!c.intent.contains(0)) as u8,
            ];
            assert_eq!(basis.srm()[i], expected);
        }
    }

    #[test]
    fn orthonormal_basis_is_orthonormal() {
        let (_, basis) = dwarf();
        let q = basis.orthonormal_basis();
        assert_eq!(q.len(), 6);
        for i in 0..q.len() {
            for j in 0..q.len() {
                let d = dot(&q[i], &q[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((d - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_y_vectors_stack_by_row_sums() {
        let (lat, basis) = dwarf();
        let vecs = ElementVectors::constant(basis.elements().to_vec(), [0.0, 1.0]);
        let l = basis.positions_from_vectors(&vecs).unwrap();
        assert_eq!(l.points[lat.bottom()], [0.0, 0.0]);
        assert_eq!(l.points[lat.top()], [0.0, 9.0]);
        assert!(validate_vector_cone(&lat, &basis, &vecs));
        let zeros = ElementVectors::zeros(basis.elements().to_vec());
        assert!(!validate_vector_cone(&lat, &basis, &zeros));
        assert!(basis.positions_from_vectors(&zeros).unwrap().points.iter().all(|p| *p == [0.0, 0.0]));
    }

    #[test]
    fn dual_representation_is_sign_and_shift() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let attr = AdditiveBasis::build(&lat, RepresentationKind::AttributeAdditive);
        let dual = AdditiveBasis::build(&lat, RepresentationKind::DualAttribute);
        let mut vecs = ElementVectors::zeros(attr.elements().to_vec());
        for (i, v) in vecs.vectors.iter_mut().enumerate() {
            *v = [i as f64 - 1.5, 1.0 + 0.3 * i as f64];
        }
        let total = vecs
            .vectors
            .iter()
            .fold([0.0, 0.0], |a, v| [a[0] + v[0], a[1] + v[1]]);
        let a = attr.positions_from_vectors(&vecs).unwrap();
        let d = dual.positions_from_vectors(&vecs).unwrap();
        for (p, q) in a.points.iter().zip(&d.points) {
            assert!((p[0] - (total[0] - q[0])).abs() < 1e-12);
            assert!((p[1] - (total[1] - q[1])).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_fixes_additive_layouts() {
        let (_, basis) = dwarf();
        let mut vecs = ElementVectors::zeros(basis.elements().to_vec());
        for (i, v) in vecs.vectors.iter_mut().enumerate() {
            *v = [(i as f64 * 0.7).sin(), 1.0 + (i as f64).cos().abs()];
        }
        let l = basis.positions_from_vectors(&vecs).unwrap();
        let p = basis.project(&l).unwrap();
        assert!(l.max_abs_diff(&p) < 1e-9);
        assert!(basis.is_additive(&l, 1e-9).unwrap().additive);
    }

    #[test]
    fn zero_layout_recovers_zero_vectors() {
        let (lat, basis) = dwarf();
        let (vecs, res) = basis.recover_vectors(&Layout::zeros(lat.len())).unwrap();
        assert_eq!(res, 0.0);
        assert!(vecs.vectors.iter().all(|v| *v == [0.0, 0.0]));
    }

    #[test]
    fn snapping_rounds_to_nearest_multiple() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let basis = AdditiveBasis::build(&lat, RepresentationKind::AttributeAdditive);
        let mut vecs = ElementVectors::zeros(basis.elements().to_vec());
        vecs.vectors[0] = [0.49, 2.0];
        let layout = basis.positions_from_vectors(&vecs).unwrap();
        let (snapped, v) = basis.snap_to_grid(&layout, 1.0).unwrap();
        assert_eq!(v.vectors[0], [0.0, 2.0]);
        assert!(snapped.points.iter().all(|p| p[0] == 0.0));
        let (again, _) = basis.snap_to_grid(&snapped, 1.0).unwrap();
        assert!(again.max_abs_diff(&snapped) < 1e-12);
        assert!(basis.snap_to_grid(&layout, 0.0).is_err());
    }

    #[test]
    fn element_names_are_namespaced() {
        let ctx = FormalContext::from_rows(&["x"], &[("x", &["x"][..])]).unwrap();
        let o = Element::Object(0).qualified_name(&ctx);
        let a = Element::Attribute(0).qualified_name(&ctx);
        assert_ne!(o, a);
        assert_eq!(Element::parse_qualified(&o, &ctx).unwrap(), Element::Object(0));
        assert_eq!(Element::parse_qualified(&a, &ctx).unwrap(), Element::Attribute(0));
    }
}
