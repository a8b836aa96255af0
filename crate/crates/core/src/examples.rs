//! Small named contexts used throughout the test suites and the CLI.

use crate::context::FormalContext;
use crate::lattice::standard_context_of_order;

/// The five dwarf planets and four of their properties.
pub fn dwarf_planets() -> FormalContext {
    FormalContext::from_rows(
        &["Non-Spherical", "Atmosphere", "Trans-Neptunian", "One Moon"],
        &[
            ("Ceres", &["Non-Spherical", "Atmosphere"][..]),
            ("Makemake", &["Non-Spherical", "Trans-Neptunian", "One Moon"][..]),
            ("Eris", &["Atmosphere", "Trans-Neptunian", "One Moon"][..]),
            ("Heumea", &["Non-Spherical", "Trans-Neptunian"][..]),
            ("Pluto", &["Atmosphere", "Trans-Neptunian"][..]),
        ],
    )
    .expect("static context")
}

fn square(n: usize, incident: impl Fn(usize, usize) -> bool) -> FormalContext {
    FormalContext::new(
        (1..=n).map(|i| format!("g{i}")).collect(),
        (1..=n).map(|i| format!("m{i}")).collect(),
        (0..n).map(|i| (0..n).map(|j| incident(i, j)).collect()).collect(),
    )
    .expect("generated names are distinct")
}

/// `g_i I m_j ⟺ i ≠ j`; its lattice is the Boolean lattice `B_n`.
pub fn contranominal(n: usize) -> FormalContext {
    square(n, |i, j| i != j)
}

/// `g_i I m_j ⟺ i = j`; its lattice is `M_n` (for `n ≥ 3`).
pub fn nominal(n: usize) -> FormalContext {
    square(n, |i, j| i == j)
}

/// `g_i I m_j ⟺ i < j` on `n - 1` objects: a chain with `n` elements.
pub fn chain(n: usize) -> FormalContext {
    assert!(n >= 1);
    square(n - 1, |i, j| i < j)
}

/// One object lacking the only attribute: the two-element chain.
pub fn two_chain() -> FormalContext {
    FormalContext::from_rows(&["m"], &[("g", &[][..])]).expect("static context")
}

/// The pentagon `N₅`.
pub fn n5() -> FormalContext {
    // 0 < a < b < 1, 0 < c < 1
    let leq = order_from_covers(5, &[(0, 1), (1, 2), (2, 4), (0, 3), (3, 4)]);
    standard_context_of_order(&leq)
}

/// The diamond `M₃`.
pub fn m3() -> FormalContext {
    nominal(3)
}

/// `M_n`: bottom, `n` pairwise incomparable atoms, top.
pub fn m_n(n: usize) -> FormalContext {
    nominal(n)
}

/// Reflexive-transitive closure of a cover list on `n` elements.
pub fn order_from_covers(n: usize, covers: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(a, b) in covers {
        leq[a][b] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    leq
}

/// The free modular lattice on three generators, generated inside a product
/// of copies of `2` and `M₃` (one factor per assignment of the generators).
pub fn free_modular_lattice_3() -> Vec<Vec<bool>> {
    // factor lattices: 2 = {0,1}; M3 = {0, a=2, b=3, c=4, 1}
    #[derive(Clone, Copy)]
    enum Factor {
        Two,
        M3,
    }
    fn join(f: Factor, x: u8, y: u8) -> u8 {
        match f {
            Factor::Two => x.max(y),
            Factor::M3 => {
                if x == y || y == 0 {
                    x
                } else if x == 0 {
                    y
                } else {
                    1
                }
            }
        }
    }
    fn meet(f: Factor, x: u8, y: u8) -> u8 {
        match f {
            Factor::Two => x.min(y),
            Factor::M3 => {
                if x == y || y == 1 {
                    x
                } else if x == 1 {
                    y
                } else {
                    0
                }
            }
        }
    }

    let mut factors = Vec::new();
    let mut gens: [Vec<u8>; 3] = [vec![], vec![], vec![]];
    for (f, values) in [(Factor::Two, vec![0u8, 1]), (Factor::M3, vec![0u8, 1, 2, 3, 4])] {
        for &x in &values {
            for &y in &values {
                for &z in &values {
                    factors.push(f);
                    gens[0].push(x);
                    gens[1].push(y);
                    gens[2].push(z);
                }
            }
        }
    }

    let mut elems: Vec<Vec<u8>> = gens.to_vec();
    loop {
        let mut fresh = Vec::new();
        for i in 0..elems.len() {
            for j in 0..elems.len() {
                let (a, b) = (&elems[i], &elems[j]);
                let jn: Vec<u8> = (0..factors.len()).map(|k| join(factors[k], a[k], b[k])).collect();
                let mt: Vec<u8> = (0..factors.len()).map(|k| meet(factors[k], a[k], b[k])).collect();
                for e in [jn, mt] {
                    if !elems.contains(&e) && !fresh.contains(&e) {
                        fresh.push(e);
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        elems.extend(fresh);
    }

    let n = elems.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..factors.len()).all(|k| meet(factors[k], elems[i][k], elems[j][k]) == elems[i][k]))
                .collect()
        })
        .collect()
}

/// Standard context of `FM(3)`.
pub fn fm3() -> FormalContext {
    standard_context_of_order(&free_modular_lattice_3())
}

/// Looks up a built-in context by name.
pub fn by_name(name: &str) -> Option<FormalContext> {
    Some(match name {
        "dwarf-planets" => dwarf_planets(),
        "n5" => n5(),
        "m3" => m3(),
        "m4" => m_n(4),
        "b2" => contranominal(2),
        "b3" => contranominal(3),
        "b4" => contranominal(4),
        "fm3" => fm3(),
        "two-chain" => two_chain(),
        _ => return None,
    })
}

pub const NAMED: &[&str] = &["dwarf-planets", "n5", "m3", "m4", "b2", "b3", "b4", "fm3", "two-chain"];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ConceptLattice;

    #[test]
    fn named_lattice_sizes() {
        let size = |c: FormalContext| ConceptLattice::from_context(&c).len();
        assert_eq!(size(n5()), 5);
        assert_eq!(size(m3()), 5);
        assert_eq!(size(contranominal(2)), 4);
        assert_eq!(size(two_chain()), 2);
        assert_eq!(size(chain(3)), 3);
    }

    #[test]
    fn fm3_has_28_elements() {
        let leq = free_modular_lattice_3();
        assert_eq!(leq.len(), 28);
        let lat = ConceptLattice::from_context(&fm3());
        assert_eq!(lat.len(), 28);
        assert!(crate::lattice::orders_isomorphic(&leq, &lat.order_matrix()));
    }
}
