//! The lattices whose standard context has exactly four attributes, i.e.
//! with exactly four meet-irreducible elements, up to isomorphism.

use crate::context::FormalContext;
use crate::lattice::ConceptLattice;

const ATTRIBUTES: usize = 4;
const SUBSETS: usize = 1 << ATTRIBUTES;
const FULL: usize = SUBSETS - 1;

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    /// `lattice-001` … in canonical order.
    pub id: String,
    pub lattice: ConceptLattice,
    /// Canonical closure system: bit `s` set iff attribute subset `s` is an intent.
    pub code: u16,
}

fn permute_mask(mask: usize, perm: &[usize; ATTRIBUTES]) -> usize {
    (0..ATTRIBUTES).filter(|&i| mask >> i & 1 == 1).map(|i| 1 << perm[i]).sum()
}

fn permutations() -> Vec<[usize; ATTRIBUTES]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

fn is_closure_system(family: u16) -> bool {
    let has = |s: usize| family >> s & 1 == 1;
    has(FULL) && (0..SUBSETS).all(|a| !has(a) || (a..SUBSETS).all(|b| !has(b) || has(a & b)))
}

/// Exactly four meet-irreducible concepts. Every meet-irreducible is an
/// attribute concept, so this also makes the four attribute concepts distinct.
fn has_four_meet_irreducibles(family: u16) -> bool {
    ConceptLattice::from_context(&context_of_family(family)).meet_irreducibles().len() == ATTRIBUTES
}

fn canonical_code(family: u16, perms: &[[usize; ATTRIBUTES]]) -> u16 {
    perms
        .iter()
        .map(|p| {
            (0..SUBSETS)
                .filter(|&s| family >> s & 1 == 1)
                .map(|s| 1u16 << permute_mask(s, p))
                .fold(0, |a, b| a | b)
        })
        .min()
        .unwrap_or(family)
}

/// Context whose concept intents are exactly the members of `family`.
pub fn context_of_family(family: u16) -> FormalContext {
    let attrs: Vec<String> = (0..ATTRIBUTES).map(|m| format!("m{}", m + 1)).collect();
    let rows: Vec<usize> = (0..SUBSETS).filter(|&s| family >> s & 1 == 1 && s != FULL).collect();
    let objects: Vec<String> = (0..rows.len()).map(|g| format!("g{}", g + 1)).collect();
    let incidence: Vec<Vec<bool>> = rows.iter().map(|&s| (0..ATTRIBUTES).map(|m| s >> m & 1 == 1).collect()).collect();
    FormalContext::new(objects, attrs, incidence).expect("well-formed context")
}

/// All 126 lattices with exactly four meet-irreducibles, sorted by
/// (concept count, canonical code).
pub fn enumerate_four_meet_irreducible_lattices() -> Vec<CatalogEntry> {
    let perms = permutations();
    let mut codes: Vec<(usize, u16)> = (0..=u16::MAX)
        .filter(|&f| is_closure_system(f) && has_four_meet_irreducibles(f))
        .map(|f| canonical_code(f, &perms))
        .map(|c| (c.count_ones() as usize, c))
        .collect();
    codes.sort_unstable();
    codes.dedup();
    codes
        .into_iter()
        .enumerate()
        .map(|(i, (_, code))| CatalogEntry {
            id: format!("lattice-{:03}", i + 1),
            lattice: ConceptLattice::from_context(&context_of_family(code)),
            code,
        })
        .collect()
}
