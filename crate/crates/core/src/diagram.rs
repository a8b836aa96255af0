//! Layouts (node placements), the line-diagram validity report, conflict
//! distance and layout quality metrics.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::lattice::ConceptLattice;

pub type Point = [f64; 2];

/// A placement of every concept in the plane, indexed by concept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub points: Vec<Point>,
}

impl Layout {
    pub fn new(points: Vec<Point>) -> Self {
        Self { points }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            points: vec![[0.0; 2]; n],
        }
    }

    pub fn from_columns(x: &[f64], y: &[f64]) -> Self {
        assert_eq!(x.len(), y.len());
        Self {
            points: x.iter().zip(y).map(|(&x, &y)| [x, y]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn column(&self, axis: usize) -> Vec<f64> {
        self.points.iter().map(|p| p[axis]).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.points.iter().all(|p| p[0].is_finite() && p[1].is_finite())
    }

    pub fn translated(&self, by: Point) -> Self {
        Self {
            points: self.points.iter().map(|p| [p[0] + by[0], p[1] + by[1]]).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.linear_map([[factor, 0.0], [0.0, factor]])
    }

    /// Applies the 2×2 matrix `m` (row-major) to every point.
    pub fn linear_map(&self, m: [[f64; 2]; 2]) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| [m[0][0] * p[0] + m[0][1] * p[1], m[1][0] * p[0] + m[1][1] * p[1]])
                .collect(),
        }
    }

    pub fn centroid(&self) -> Point {
        let n = self.len().max(1) as f64;
        let s = self
            .points
            .iter()
            .fold([0.0, 0.0], |a, p| [a[0] + p[0], a[1] + p[1]]);
        [s[0] / n, s[1] / n]
    }

    /// `(min, max)` corners of the bounding box.
    pub fn bounds(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.points {
            for a in 0..2 {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        (lo, hi)
    }

    pub fn max_abs_diff(&self, other: &Layout) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .flat_map(|(a, b)| [(a[0] - b[0]).abs(), (a[1] - b[1]).abs()])
            .fold(0.0, f64::max)
    }

    pub fn check_matches(&self, lat: &ConceptLattice) -> Result<()> {
        if self.len() != lat.len() {
            return Err(Error::LayoutMismatch(format!(
                "layout has {} nodes, lattice has {} concepts",
                self.len(),
                lat.len()
            )));
        }
        if !self.is_finite() {
            return Err(Error::LayoutMismatch("non-finite coordinate".into()));
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub(crate) fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub(crate) fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn norm(a: Point) -> f64 {
    a[0].hypot(a[1])
}

/// Which branch of the conflict distance applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictCase {
    /// `w` lies before `w1` along the edge; distance to `w1`.
    BeforeLower,
    /// `w` lies past `w2`; distance to `w2`.
    PastUpper,
    /// Perpendicular distance to the edge line.
    Between,
}

pub fn conflict_case(w: Point, w1: Point, w2: Point) -> ConflictCase {
    let f = sub(w2, w1);
    if dot(sub(w1, w), f) > 0.0 {
        ConflictCase::BeforeLower
    } else if dot(sub(w2, w), f) < 0.0 {
        ConflictCase::PastUpper
    } else {
        ConflictCase::Between
    }
}

/// Distance between node `w` and the edge `w1 w2`.
pub fn conflict_distance(w: Point, w1: Point, w2: Point) -> Result<f64> {
    let f = sub(w2, w1);
    let len = norm(f);
    if len == 0.0 {
        return Err(Error::DegenerateEdge { x: w1[0], y: w1[1] });
    }
    Ok(match conflict_case(w, w1, w2) {
        ConflictCase::BeforeLower => norm(sub(w1, w)),
        ConflictCase::PastUpper => norm(sub(w2, w)),
        ConflictCase::Between => cross(sub(w1, w), sub(w2, w)).abs() / len,
    })
}

/// Every `(node, lower, upper)` triple with the node not incident to the cover edge.
pub fn non_incident_pairs(lat: &ConceptLattice) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
    lat.covers().iter().flat_map(move |&(lo, hi)| {
        (0..lat.len())
            .filter(move |&v| v != lo && v != hi)
            .map(move |v| (v, lo, hi))
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidityReport {
    pub valid: bool,
    /// Covers `(lower, upper)` that do not rise strictly.
    pub order_violations: Vec<(usize, usize)>,
    /// Node pairs closer than the gap.
    pub node_clashes: Vec<(usize, usize)>,
    /// `(node, lower, upper)` with conflict distance below the gap.
    pub edge_conflicts: Vec<(usize, usize, usize)>,
    pub min_node_distance: f64,
    pub min_conflict_distance: f64,
}

/// Checks membership in the cone of line diagrams (every cover rises by
/// more than `min_rise`) and the node/edge separation constraints.
pub fn validate_line_diagram(
    lat: &ConceptLattice,
    layout: &Layout,
    min_rise: f64,
    min_gap: f64,
) -> Result<ValidityReport> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    let order_violations: Vec<(usize, usize)> = lat
        .covers()
        .iter()
        .copied()
        .filter(|&(lo, hi)| !(p[hi][1] - p[lo][1] > min_rise))
        .collect();

    let mut node_clashes = Vec::new();
    let mut min_node_distance = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = norm(sub(p[i], p[j]));
            min_node_distance = min_node_distance.min(d);
            if d < min_gap {
                node_clashes.push((i, j));
            }
        }
    }

    let mut edge_conflicts = Vec::new();
    let mut min_conflict_distance = f64::INFINITY;
    for (v, lo, hi) in non_incident_pairs(lat) {
        let d = conflict_distance(p[v], p[lo], p[hi]).unwrap_or(0.0);
        min_conflict_distance = min_conflict_distance.min(d);
        if d < min_gap {
            edge_conflicts.push((v, lo, hi));
        }
    }

    Ok(ValidityReport {
        valid: order_violations.is_empty() && node_clashes.is_empty() && edge_conflicts.is_empty(),
        order_violations,
        node_clashes,
        edge_conflicts,
        min_node_distance,
        min_conflict_distance,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityMetrics {
    pub min_conflict_distance: f64,
    pub edge_crossings: usize,
    pub distinct_slopes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_distance: Option<f64>,
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    cross(sub(b, a), sub(c, a))
}

/// Proper crossing: the open segments intersect in a single interior point.
pub fn segments_cross(a1: Point, a2: Point, b1: Point, b2: Point) -> bool {
    let d1 = orient(a1, a2, b1);
    let d2 = orient(a1, a2, b2);
    let d3 = orient(b1, b2, a1);
    let d4 = orient(b1, b2, a2);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

pub const SLOPE_BUCKET: f64 = 1e-6;

pub fn quality_metrics(lat: &ConceptLattice, layout: &Layout) -> Result<QualityMetrics> {
    layout.check_matches(lat)?;
    let p = &layout.points;
    let mut min_conflict_distance = f64::INFINITY;
    for (v, lo, hi) in non_incident_pairs(lat) {
        let d = conflict_distance(p[v], p[lo], p[hi]).unwrap_or(0.0);
        min_conflict_distance = min_conflict_distance.min(d);
    }
    if !min_conflict_distance.is_finite() {
        min_conflict_distance = 0.0;
    }

    let covers = lat.covers();
    let mut edge_crossings = 0;
    for (i, &(a, b)) in covers.iter().enumerate() {
        for &(c, d) in &covers[i + 1..] {
            if a == c || a == d || b == c || b == d {
                continue;
            }
            if segments_cross(p[a], p[b], p[c], p[d]) {
                edge_crossings += 1;
            }
        }
    }

    let slopes: BTreeSet<i64> = covers
        .iter()
        .map(|&(lo, hi)| {
            let d = sub(p[hi], p[lo]);
            let mut angle = d[1].atan2(d[0]);
            if angle < 0.0 {
                angle += std::f64::consts::PI;
            }
            if angle >= std::f64::consts::PI {
                angle -= std::f64::consts::PI;
            }
            (angle / SLOPE_BUCKET).round() as i64
        })
        .collect();

    Ok(QualityMetrics {
        min_conflict_distance,
        edge_crossings,
        distinct_slopes: slopes.len(),
        reference_distance: None,
    })
}

/// Node entry of the layout JSON format.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayoutNode {
    pub concept: usize,
    #[serde(default)]
    pub extent: Vec<String>,
    #[serde(default)]
    pub intent: Vec<String>,
    pub x: f64,
    pub y: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LayoutJson {
    pub dimension: usize,
    pub nodes: Vec<LayoutNode>,
}

fn names(all: &[String], set: &BitSet) -> Vec<String> {
    set.iter().map(|i| all[i].clone()).collect()
}

impl LayoutJson {
    pub fn from_layout(lat: &ConceptLattice, layout: &Layout) -> Self {
        let ctx = lat.context();
        Self {
            dimension: 2,
            nodes: layout
                .points
                .iter()
                .enumerate()
                .map(|(i, p)| LayoutNode {
                    concept: i,
                    extent: names(ctx.objects(), &lat.concept(i).extent),
                    intent: names(ctx.attributes(), &lat.concept(i).intent),
                    x: p[0],
                    y: p[1],
                })
                .collect(),
        }
    }

    /// Maps nodes onto concepts. Nodes carrying an extent or intent are matched
    /// by that (robust to a different concept enumeration order); bare nodes
    /// are matched by index.
    pub fn to_layout(&self, lat: &ConceptLattice) -> Result<Layout> {
        if self.dimension != 2 {
            return Err(Error::LayoutMismatch(format!(
                "only two-dimensional layouts are supported, got {}",
                self.dimension
            )));
        }
        let ctx = lat.context();
        let mut points = vec![None; lat.len()];
        for node in &self.nodes {
            let idx = if !node.extent.is_empty() || !node.intent.is_empty() {
                let by_ext = ctx.object_set(node.extent.iter().map(String::as_str))?;
                let by_int = ctx.attribute_set(node.intent.iter().map(String::as_str))?;
                // one of the two may be empty for the top/bottom concept
                lat.concepts()
                    .iter()
                    .position(|c| c.extent == by_ext && c.intent == by_int)
                    .or_else(|| {
                        if node.intent.is_empty() {
                            lat.index_of_extent(&by_ext)
                        } else if node.extent.is_empty() {
                            lat.index_of_intent(&by_int)
                        } else {
                            None
                        }
                    })
                    .ok_or_else(|| {
                        Error::LayoutMismatch(format!("node {} matches no concept", node.concept))
                    })?
            } else {
                node.concept
            };
            if idx >= lat.len() {
                return Err(Error::LayoutMismatch(format!("concept index {idx} out of range")));
            }
            points[idx] = Some([node.x, node.y]);
        }
        let points = points
            .into_iter()
            .enumerate()
            .map(|(i, p)| p.ok_or_else(|| Error::LayoutMismatch(format!("concept {i} has no node"))))
            .collect::<Result<Vec<_>>>()?;
        let layout = Layout::new(points);
        layout.check_matches(lat)?;
        Ok(layout)
    }
}

/// Euclidean distance of two layouts seen as vectors in `R^{2|L|}`. With
/// `normalize`, both are first centred on their centroid and scaled to unit
/// root-mean-square radius.
pub fn layout_distance(a: &Layout, b: &Layout, normalize: bool) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LayoutMismatch("layouts differ in size".into()));
    }
    let prep = |l: &Layout| -> Layout {
        if !normalize {
            return l.clone();
        }
        let c = l.centroid();
        let centred = l.translated([-c[0], -c[1]]);
        let rms = (centred.points.iter().map(|p| dot(*p, *p)).sum::<f64>() / l.len().max(1) as f64).sqrt();
        if rms > 0.0 {
            centred.scaled(1.0 / rms)
        } else {
            centred
        }
    };
    let (a, b) = (prep(a), prep(b));
    Ok(a.points
        .iter()
        .zip(&b.points)
        .map(|(p, q)| {
            let d = sub(*p, *q);
            dot(d, d)
        })
        .sum::<f64>()
        .sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn conflict_distance_cases() {
        assert_eq!(conflict_distance([0.0, 1.0], [-1.0, 0.0], [1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(conflict_distance([-2.0, 0.0], [-1.0, 0.0], [1.0, 0.0]).unwrap(), 1.0);
        assert!(conflict_distance([0.0, 0.0], [1.0, 1.0], [1.0, 1.0]).is_err());
    }

    #[test]
    fn conflict_distance_matches_sampled_segment() {
        let (w, w1, w2) = ([0.3, 0.4], [0.0, 0.0], [1.0, 0.0]);
        let sampled = (0..=1000)
            .map(|k| {
                let t = k as f64 / 1000.0;
                norm(sub(w, [w1[0] + t * (w2[0] - w1[0]), w1[1] + t * (w2[1] - w1[1])]))
            })
            .fold(f64::INFINITY, f64::min);
        let d = conflict_distance(w, w1, w2).unwrap();
        assert!((d - sampled).abs() < 1e-3);
        assert!((d - 0.4).abs() < 1e-12);
    }

    #[test]
    fn two_chain_validity() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let (lo, hi) = lat.covers()[0];
        let mut pts = vec![[0.0; 2]; 2];
        pts[hi] = [0.0, 1.0];
        let r = validate_line_diagram(&lat, &Layout::new(pts.clone()), 0.0, 0.05).unwrap();
        assert!(r.valid);
        pts[hi] = pts[lo];
        let r = validate_line_diagram(&lat, &Layout::new(pts), 0.0, 0.05).unwrap();
        assert!(!r.valid);
        assert_eq!(r.node_clashes.len(), 1);
    }

    #[test]
    fn metrics_of_chain_and_crossing() {
        let lat = ConceptLattice::from_context(&examples::two_chain());
        let (_, hi) = lat.covers()[0];
        let mut pts = vec![[0.0; 2]; 2];
        pts[hi] = [0.0, 1.0];
        let m = quality_metrics(&lat, &Layout::new(pts)).unwrap();
        assert_eq!(m.edge_crossings, 0);
        assert_eq!(m.distinct_slopes, 1);
        assert!(segments_cross([-1.0, 0.0], [1.0, 1.0], [1.0, 0.0], [-1.0, 1.0]));
        assert!(!segments_cross([-1.0, 0.0], [-1.0, 1.0], [1.0, 0.0], [1.0, 1.0]));
    }

    #[test]
    fn layout_distance_basics() {
        let a = Layout::new(vec![[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]]);
        assert_eq!(layout_distance(&a, &a, false).unwrap(), 0.0);
        let b = a.translated([5.0, 0.0]);
        assert!(layout_distance(&a, &b, true).unwrap() < 1e-12);
        assert!((layout_distance(&a, &b, false).unwrap() - 75f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn layout_json_matches_by_labels() {
        let lat = ConceptLattice::from_context(&examples::dwarf_planets());
        let layout = Layout::new((0..lat.len()).map(|i| [i as f64, (i * i) as f64]).collect());
        let mut json = LayoutJson::from_layout(&lat, &layout);
        json.nodes.reverse();
        for (k, n) in json.nodes.iter_mut().enumerate() {
            n.concept = k;
        }
        let back = json.to_layout(&lat).unwrap();
        assert_eq!(back, layout);
    }
}
