//! Concept lattice construction, covering relation, irreducibles and rank.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::context::FormalContext;

/// A formal concept `(A, B)` with `A′ = B` and `B′ = A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Concept {
    pub extent: BitSet,
    pub intent: BitSet,
}

/// The concept lattice of a context, with concepts in lectic order of their
/// intents (the top concept, whose intent is smallest, comes first).
#[derive(Clone, Debug)]
pub struct ConceptLattice {
    context: FormalContext,
    concepts: Vec<Concept>,
    /// `up[i]` holds every `j` with `i ≤ j`.
    up: Vec<BitSet>,
    covers: Vec<(usize, usize)>,
    upper_covers: Vec<Vec<usize>>,
    lower_covers: Vec<Vec<usize>>,
    meet_irreducible: BitSet,
    join_irreducible: BitSet,
    object_concept: Vec<usize>,
    attribute_concept: Vec<usize>,
    bottom: usize,
    top: usize,
    by_extent: HashMap<BitSet, usize>,
    by_intent: HashMap<BitSet, usize>,
}

/// All intents in lectic order (NextClosure).
fn lectic_intents(ctx: &FormalContext) -> Vec<BitSet> {
    let m = ctx.num_attributes();
    let mut out = Vec::new();
    let mut current = ctx.close_intent(&BitSet::new(m));
    loop {
        out.push(current.clone());
        let mut next = None;
        for i in (0..m).rev() {
            if current.contains(i) {
                continue;
            }
            let mut candidate = current.clone();
            candidate.truncate(i);
            candidate.insert(i);
            let closed = ctx.close_intent(&candidate);
            if closed.agrees_below(&current, i) {
                next = Some(closed);
                break;
            }
        }
        match next {
            Some(n) => current = n,
            None => return out,
        }
    }
}

impl ConceptLattice {
    pub fn from_context(ctx: &FormalContext) -> Self {
        let concepts: Vec<Concept> = lectic_intents(ctx)
            .into_iter()
            .map(|intent| Concept {
                extent: ctx.derive_attributes(&intent),
                intent,
            })
            .collect();
        let n = concepts.len();

        let mut up = vec![BitSet::new(n); n];
        for i in 0..n {
            for j in 0..n {
                if concepts[i].extent.is_subset(&concepts[j].extent) {
                    up[i].insert(j);
                }
            }
        }

        let mut covers = Vec::new();
        let mut upper_covers = vec![Vec::new(); n];
        let mut lower_covers = vec![Vec::new(); n];
        for i in 0..n {
            for j in up[i].iter() {
                if j == i {
                    continue;
                }
                // i < j is a cover iff no z with i < z < j
                let between = up[i]
                    .iter()
                    .any(|z| z != i && z != j && up[z].contains(j));
                if !between {
                    covers.push((i, j));
                    upper_covers[i].push(j);
                    lower_covers[j].push(i);
                }
            }
        }

        let bottom = (0..n).find(|&i| up[i].len() == n).expect("lattice has a bottom");
        let top = (0..n).find(|&i| (0..n).all(|j| up[j].contains(i))).expect("lattice has a top");

        let mut meet_irreducible = BitSet::new(n);
        let mut join_irreducible = BitSet::new(n);
        for i in 0..n {
            if upper_covers[i].len() == 1 {
                meet_irreducible.insert(i);
            }
            if lower_covers[i].len() == 1 {
                join_irreducible.insert(i);
            }
        }

        let by_extent: HashMap<BitSet, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.extent.clone(), i))
            .collect();
        let by_intent: HashMap<BitSet, usize> = concepts
            .iter()
            .enumerate()
            .map(|(i, c)| (c.intent.clone(), i))
            .collect();

        let object_concept = (0..ctx.num_objects())
            .map(|g| {
                let ext = ctx.close_extent(&BitSet::from_indices(ctx.num_objects(), [g]));
                by_extent[&ext]
            })
            .collect();
        let attribute_concept = (0..ctx.num_attributes())
            .map(|m| {
                let int = ctx.close_intent(&BitSet::from_indices(ctx.num_attributes(), [m]));
                by_intent[&int]
            })
            .collect();

        Self {
            context: ctx.clone(),
            concepts,
            up,
            covers,
            upper_covers,
            lower_covers,
            meet_irreducible,
            join_irreducible,
            object_concept,
            attribute_concept,
            bottom,
            top,
            by_extent,
            by_intent,
        }
    }

    pub fn context(&self) -> &FormalContext {
        &self.context
    }

    pub fn len(&self) -> usize {
        self.concepts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn concepts(&self) -> &[Concept] {
        &self.concepts
    }

    pub fn concept(&self, i: usize) -> &Concept {
        &self.concepts[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.up[i].contains(j)
    }

    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// Up-set of `i` (all `j ≥ i`).
    pub fn up_set(&self, i: usize) -> &BitSet {
        &self.up[i]
    }

    /// Reflexive order as a dense boolean matrix.
    pub fn order_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.leq(i, j)).collect())
            .collect()
    }

    /// Cover pairs `(lower, upper)`.
    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn upper_covers(&self, i: usize) -> &[usize] {
        &self.upper_covers[i]
    }

    pub fn lower_covers(&self, i: usize) -> &[usize] {
        &self.lower_covers[i]
    }

    pub fn meet_irreducibles(&self) -> &BitSet {
        &self.meet_irreducible
    }

    pub fn join_irreducibles(&self) -> &BitSet {
        &self.join_irreducible
    }

    /// `γ(g)`
    pub fn object_concept(&self, g: usize) -> usize {
        self.object_concept[g]
    }

    /// `μ(m)`
    pub fn attribute_concept(&self, m: usize) -> usize {
        self.attribute_concept[m]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn index_of_extent(&self, extent: &BitSet) -> Option<usize> {
        self.by_extent.get(extent).copied()
    }

    pub fn index_of_intent(&self, intent: &BitSet) -> Option<usize> {
        self.by_intent.get(intent).copied()
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        let ext = self.concepts[i].extent.intersection(&self.concepts[j].extent);
        self.by_extent[&ext]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        let int = self.concepts[i].intent.intersection(&self.concepts[j].intent);
        self.by_intent[&int]
    }

    /// Concept indices sorted so that every concept precedes those above it.
    pub fn linear_from_bottom(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| (self.concepts[i].extent.len(), std::cmp::Reverse(i)));
        idx
    }

    /// `rank(⊥) = 0`, `rank(v) = 1 + max rank over lower covers`.
    pub fn rank(&self) -> Vec<usize> {
        let mut rank = vec![0; self.len()];
        for v in self.linear_from_bottom() {
            rank[v] = self.lower_covers[v]
                .iter()
                .map(|&u| rank[u] + 1)
                .max()
                .unwrap_or(0);
        }
        rank
    }

    /// The standard context `(J(L), M(L), ≤)`, named after the first object
    /// (resp. attribute) generating each irreducible.
    pub fn reduce_context(&self) -> FormalContext {
        let ctx = &self.context;
        let mut objects = Vec::new();
        let mut seen = BitSet::new(self.len());
        for g in 0..ctx.num_objects() {
            let c = self.object_concept[g];
            if self.join_irreducible.contains(c) && !seen.contains(c) {
                seen.insert(c);
                objects.push((ctx.objects()[g].clone(), c));
            }
        }
        let mut attributes = Vec::new();
        let mut seen = BitSet::new(self.len());
        for m in 0..ctx.num_attributes() {
            let c = self.attribute_concept[m];
            if self.meet_irreducible.contains(c) && !seen.contains(c) {
                seen.insert(c);
                attributes.push((ctx.attributes()[m].clone(), c));
            }
        }
        let incidence = objects
            .iter()
            .map(|(_, j)| attributes.iter().map(|(_, m)| self.leq(*j, *m)).collect())
            .collect();
        FormalContext::new(
            objects.into_iter().map(|(n, _)| n).collect(),
            attributes.into_iter().map(|(n, _)| n).collect(),
            incidence,
        )
        .expect("standard context names are inherited from a valid context")
    }
}

/// Concept entry of the lattice JSON format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConceptJson {
    pub index: usize,
    pub extent: Vec<String>,
    pub intent: Vec<String>,
    /// Attributes whose attribute concept this is.
    pub attribute_labels: Vec<String>,
    /// Objects whose object concept this is.
    pub object_labels: Vec<String>,
}

/// Lattice JSON: concepts, covers `(lower, upper)`, top and bottom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeJson {
    pub concepts: Vec<ConceptJson>,
    pub covers: Vec<(usize, usize)>,
    pub top: usize,
    pub bottom: usize,
}

impl LatticeJson {
    pub fn from_lattice(lat: &ConceptLattice) -> Self {
        let ctx = lat.context();
        let mut concepts: Vec<ConceptJson> = lat
            .concepts()
            .iter()
            .enumerate()
            .map(|(index, c)| ConceptJson {
                index,
                extent: c.extent.iter().map(|g| ctx.objects()[g].clone()).collect(),
                intent: c.intent.iter().map(|m| ctx.attributes()[m].clone()).collect(),
                attribute_labels: Vec::new(),
                object_labels: Vec::new(),
            })
            .collect();
        for (m, name) in ctx.attributes().iter().enumerate() {
            concepts[lat.attribute_concept(m)].attribute_labels.push(name.clone());
        }
        for (g, name) in ctx.objects().iter().enumerate() {
            concepts[lat.object_concept(g)].object_labels.push(name.clone());
        }
        Self { concepts, covers: lat.covers().to_vec(), top: lat.top(), bottom: lat.bottom() }
    }
}

/// The standard context of an abstract finite lattice given by its reflexive
/// order matrix. Irreducibles are named `j<i>` / `m<i>` after element indices.
pub fn standard_context_of_order(leq: &[Vec<bool>]) -> FormalContext {
    let n = leq.len();
    let lt = |a: usize, b: usize| a != b && leq[a][b];
    let covers = |a: usize, b: usize| lt(a, b) && !(0..n).any(|z| lt(a, z) && lt(z, b));
    let join_irr: Vec<usize> = (0..n)
        .filter(|&v| (0..n).filter(|&u| covers(u, v)).count() == 1)
        .collect();
    let meet_irr: Vec<usize> = (0..n)
        .filter(|&u| (0..n).filter(|&v| covers(u, v)).count() == 1)
        .collect();
    FormalContext::new(
        join_irr.iter().map(|j| format!("j{j}")).collect(),
        meet_irr.iter().map(|m| format!("m{m}")).collect(),
        join_irr
            .iter()
            .map(|&j| meet_irr.iter().map(|&m| leq[j][m]).collect())
            .collect(),
    )
    .expect("generated names are distinct")
}

/// Brute-force order isomorphism test by backtracking with degree invariants.
pub fn orders_isomorphic(a: &[Vec<bool>], b: &[Vec<bool>]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let invariant = |o: &[Vec<bool>], i: usize| {
        let up = (0..n).filter(|&j| o[i][j]).count();
        let down = (0..n).filter(|&j| o[j][i]).count();
        (down, up)
    };
    let inv_a: Vec<_> = (0..n).map(|i| invariant(a, i)).collect();
    let inv_b: Vec<_> = (0..n).map(|i| invariant(b, i)).collect();
    let mut sa = inv_a.clone();
    let mut sb = inv_b.clone();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| inv_a[i]);

    fn extend(
        k: usize,
        order: &[usize],
        a: &[Vec<bool>],
        b: &[Vec<bool>],
        inv_a: &[(usize, usize)],
        inv_b: &[(usize, usize)],
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let x = order[k];
        for y in 0..b.len() {
            if used[y] || inv_a[x] != inv_b[y] {
                continue;
            }
            let consistent = order[..k].iter().all(|&p| {
                let q = map[p];
                a[p][x] == b[q][y] && a[x][p] == b[y][q]
            });
            if !consistent {
                continue;
            }
            map[x] = y;
            used[y] = true;
            if extend(k + 1, order, a, b, inv_a, inv_b, map, used) {
                return true;
            }
            used[y] = false;
        }
        false
    }

    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(0, &order, a, b, &inv_a, &inv_b, &mut map, &mut used)
}

pub fn lattices_isomorphic(a: &ConceptLattice, b: &ConceptLattice) -> bool {
    orders_isomorphic(&a.order_matrix(), &b.order_matrix())
}
