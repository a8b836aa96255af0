//! Realizers of orders, the test for order dimension two, minimal
//! two-dimensional extensions found by satisfiability search, and
//! realizer-embedded coordinates.
//!
//! Orders are given as reflexive `leq` matrices. For every incomparable pair
//! `i < j` (by index) one variable states `i <₁ j` in the first linear
//! extension; transitivity clauses over all element triples make each
//! extension a linear order. In the plain dimension test the second
//! extension reverses every incomparable pair; in the extension search a
//! second variable set orients the pair in `<₂`, and a selection variable
//! marks pairs oriented alike in both, which are exactly the added pairs.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::additive::AdditiveBasis;
use crate::diagram::Layout;
use crate::error::Result;
use crate::lattice::ConceptLattice;
use crate::sat::{Budget, Lit, SolveResult, Solver, Var};

/// Linear extensions, each listed from the bottom up.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realizer {
    pub extensions: Vec<Vec<usize>>,
}

impl Realizer {
    pub fn arity(&self) -> usize {
        self.extensions.len()
    }

    /// `rank[e][x]`: position of `x` in extension `e`.
    pub fn ranks(&self) -> Vec<Vec<usize>> {
        self.extensions
            .iter()
            .map(|ext| {
                let mut r = vec![0; ext.len()];
                for (i, &x) in ext.iter().enumerate() {
                    r[x] = i;
                }
                r
            })
            .collect()
    }

    /// Whether every extension is a linear extension of `leq` and their
    /// intersection is exactly `leq`.
    pub fn realizes(&self, leq: &[Vec<bool>]) -> bool {
        let n = leq.len();
        let ranks = self.ranks();
        let permutations = self.extensions.iter().all(|ext| {
            let mut seen = vec![false; n];
            ext.len() == n && ext.iter().all(|&x| x < n && !std::mem::replace(&mut seen[x], true))
        });
        permutations
            && (0..n).all(|a| {
                (0..n).all(|b| a == b || leq[a][b] == ranks.iter().all(|r| r[a] < r[b]))
            })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtensionResult {
    /// Added relations `(a, b)` meaning `a < b`.
    pub added_pairs: Vec<(usize, usize)>,
    pub realizer: Realizer,
    /// `false` when the budget ran out before minimality was proven.
    pub minimal: bool,
}

impl ExtensionResult {
    pub fn k(&self) -> usize {
        self.added_pairs.len()
    }

    /// `≤ ∪ T` as a reflexive relation matrix.
    pub fn extended_order(&self, leq: &[Vec<bool>]) -> Vec<Vec<bool>> {
        let mut out = leq.to_vec();
        for &(a, b) in &self.added_pairs {
            out[a][b] = true;
        }
        out
    }
}

/// Limits for the extension search.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtensionBudget {
    pub max_conflicts: Option<u64>,
    pub max_seconds: Option<f64>,
}

impl Default for ExtensionBudget {
    fn default() -> Self {
        Self { max_conflicts: None, max_seconds: Some(600.0) }
    }
}

impl ExtensionBudget {
    pub fn unlimited() -> Self {
        Self { max_conflicts: None, max_seconds: None }
    }

    fn start(&self) -> Tracker {
        Tracker {
            deadline: self.max_seconds.map(|s| Instant::now() + Duration::from_secs_f64(s)),
            conflicts_left: self.max_conflicts,
        }
    }
}

struct Tracker {
    deadline: Option<Instant>,
    conflicts_left: Option<u64>,
}

impl Tracker {
    fn solve(&mut self, solver: &mut Solver, assumptions: &[Lit]) -> SolveResult {
        let before = solver.stats().conflicts;
        let r = solver.solve_with(assumptions, Budget { conflicts: self.conflicts_left, deadline: self.deadline });
        if let Some(left) = &mut self.conflicts_left {
            *left = left.saturating_sub(solver.stats().conflicts - before);
        }
        r
    }
}

/// Unordered incomparable pairs `(i, j)` with `i < j`.
pub fn incomparable_pairs(leq: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let n = leq.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if !leq[i][j] && !leq[j][i] {
                out.push((i, j));
            }
        }
    }
    out
}

#[derive(Clone, Copy)]
enum Rel {
    True,
    False,
    Lit(Lit),
}

/// Variables orienting the incomparable pairs in one linear extension.
struct Orientation {
    n: usize,
    leq: Vec<Vec<bool>>,
    /// Literal for `i <ₑ j` per unordered incomparable pair, indexed `[i][j]`.
    var_of: Vec<Vec<Option<Lit>>>,
}

impl Orientation {
    fn rel(&self, a: usize, b: usize) -> Rel {
        if self.leq[a][b] {
            Rel::True
        } else if self.leq[b][a] {
            Rel::False
        } else if a < b {
            Rel::Lit(self.var_of[a][b].expect("incomparable pair has a variable"))
        } else {
            Rel::Lit(!self.var_of[b][a].expect("incomparable pair has a variable"))
        }
    }

    fn add_transitivity(&self, solver: &mut Solver) {
        let n = self.n;
        let mut clause = Vec::with_capacity(3);
        for a in 0..n {
            for b in 0..n {
                if a == b {
                    continue;
                }
                for c in 0..n {
                    if c == a || c == b {
                        continue;
                    }
                    // a < b and b < c imply a < c
                    clause.clear();
                    let mut satisfied = false;
                    for (rel, positive) in [(self.rel(a, b), false), (self.rel(b, c), false), (self.rel(a, c), true)] {
                        match (rel, positive) {
                            (Rel::True, true) | (Rel::False, false) => satisfied = true,
                            (Rel::True, false) | (Rel::False, true) => {}
                            (Rel::Lit(l), true) => clause.push(l),
                            (Rel::Lit(l), false) => clause.push(!l),
                        }
                    }
                    if !satisfied && !clause.is_empty() {
                        solver.add_clause(&clause);
                    }
                }
            }
        }
    }

    fn holds(&self, a: usize, b: usize, model: &dyn Fn(Lit) -> bool) -> bool {
        match self.rel(a, b) {
            Rel::True => true,
            Rel::False => false,
            Rel::Lit(l) => model(l),
        }
    }

    fn extension(&self, model: &dyn Fn(Lit) -> bool) -> Vec<usize> {
        let mut below: Vec<(usize, usize)> = (0..self.n)
            .map(|a| ((0..self.n).filter(|&b| b != a && self.holds(b, a, model)).count(), a))
            .collect();
        below.sort();
        below.into_iter().map(|(_, a)| a).collect()
    }
}

fn lit_value(solver: &Solver) -> impl Fn(Lit) -> bool + '_ {
    move |l: Lit| solver.model_value(l.var()) != l.is_negated()
}

/// Returns a realizer of size two, or `None` if the order dimension exceeds 2.
pub fn is_two_dimensional(leq: &[Vec<bool>]) -> Option<Realizer> {
    let n = leq.len();
    let mut solver = Solver::new();
    let mut var_of = vec![vec![None; n]; n];
    for (i, j) in incomparable_pairs(leq) {
        var_of[i][j] = Some(Lit::pos(solver.new_var()));
    }
    let first = Orientation { n, leq: leq.to_vec(), var_of: var_of.clone() };
    let reversed = var_of
        .iter()
        .map(|row| row.iter().map(|l| l.map(|l: Lit| !l)).collect())
        .collect();
    let second = Orientation { n, leq: leq.to_vec(), var_of: reversed };
    first.add_transitivity(&mut solver);
    second.add_transitivity(&mut solver);
    match solver.solve() {
        SolveResult::Sat => {
            let model = lit_value(&solver);
            Some(Realizer { extensions: vec![first.extension(&model), second.extension(&model)] })
        }
        _ => None,
    }
}

/// All ordered two-element realizers `(<₁, <₂)` of `leq`, up to `limit`.
pub fn two_realizers(leq: &[Vec<bool>], limit: usize) -> Vec<Realizer> {
    let n = leq.len();
    let mut solver = Solver::new();
    let mut var_of = vec![vec![None; n]; n];
    let pairs = incomparable_pairs(leq);
    for &(i, j) in &pairs {
        var_of[i][j] = Some(Lit::pos(solver.new_var()));
    }
    let reversed = var_of
        .iter()
        .map(|row| row.iter().map(|l| l.map(|l: Lit| !l)).collect())
        .collect();
    let first = Orientation { n, leq: leq.to_vec(), var_of };
    let second = Orientation { n, leq: leq.to_vec(), var_of: reversed };
    first.add_transitivity(&mut solver);
    second.add_transitivity(&mut solver);
    let mut out = Vec::new();
    while out.len() < limit && solver.solve() == SolveResult::Sat {
        let block: Vec<Lit> = {
            let model = lit_value(&solver);
            out.push(Realizer { extensions: vec![first.extension(&model), second.extension(&model)] });
            pairs
                .iter()
                .map(|&(i, j)| {
                    let x = first.var_of[i][j].unwrap();
                    if model(x) { !x } else { x }
                })
                .collect()
        };
        if block.is_empty() || !solver.add_clause(&block) {
            break;
        }
    }
    out
}

/// SAT encoding of "two linear extensions agreeing on at most k incomparable pairs".
struct ExtensionSearch {
    pairs: Vec<(usize, usize)>,
    first: Orientation,
    second: Orientation,
    select: Vec<Var>,
    /// `counter[j]` true whenever at least `j + 1` pairs are selected.
    counter: Vec<Lit>,
    solver: Solver,
}

impl ExtensionSearch {
    fn new(leq: &[Vec<bool>]) -> Self {
        let n = leq.len();
        let pairs = incomparable_pairs(leq);
        let mut solver = Solver::new();
        let mut v1 = vec![vec![None; n]; n];
        let mut v2 = vec![vec![None; n]; n];
        for &(i, j) in &pairs {
            v1[i][j] = Some(Lit::pos(solver.new_var()));
        }
        for &(i, j) in &pairs {
            v2[i][j] = Some(Lit::pos(solver.new_var()));
        }
        let first = Orientation { n, leq: leq.to_vec(), var_of: v1 };
        let second = Orientation { n, leq: leq.to_vec(), var_of: v2 };
        let mut select = Vec::with_capacity(pairs.len());
        for &(i, j) in &pairs {
            let s = solver.new_var();
            let (x, y) = (first.var_of[i][j].unwrap(), second.var_of[i][j].unwrap());
            let s = Lit::pos(s);
            solver.add_clause(&[!s, !x, y]);
            solver.add_clause(&[!s, x, !y]);
            solver.add_clause(&[s, !x, !y]);
            solver.add_clause(&[s, x, y]);
            select.push(s.var());
        }
        first.add_transitivity(&mut solver);
        second.add_transitivity(&mut solver);

        // sequential counter: r[i][j] whenever at least j+1 of the first i+1 selections hold
        let m = pairs.len();
        let mut prev: Vec<Lit> = Vec::new();
        for (i, &s) in select.iter().enumerate() {
            let s = Lit::pos(s);
            let cur: Vec<Lit> = (0..=i).map(|_| Lit::pos(solver.new_var())).collect();
            solver.add_clause(&[!s, cur[0]]);
            for j in 0..prev.len() {
                solver.add_clause(&[!prev[j], cur[j]]);
                solver.add_clause(&[!s, !prev[j], cur[j + 1]]);
            }
            prev = cur;
        }
        debug_assert_eq!(prev.len(), m);
        Self { pairs, first, second, select, counter: prev, solver }
    }

    fn at_most(&self, k: usize) -> Vec<Lit> {
        self.counter.get(k).map(|&r| vec![!r]).unwrap_or_default()
    }

    fn decode(&self) -> ExtensionResult {
        let model = lit_value(&self.solver);
        let mut added = Vec::new();
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            if self.solver.model_value(self.select[p]) {
                let x = self.first.var_of[i][j].unwrap();
                added.push(if model(x) { (i, j) } else { (j, i) });
            }
        }
        added.sort();
        ExtensionResult {
            added_pairs: added,
            realizer: Realizer {
                extensions: vec![self.first.extension(&model), self.second.extension(&model)],
            },
            minimal: false,
        }
    }

    fn block(&mut self, result: &ExtensionResult) {
        let mut clause = Vec::new();
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let s = Lit::pos(self.select[p]);
            let x = self.first.var_of[i][j].unwrap();
            if result.added_pairs.contains(&(i, j)) {
                clause.push(!s);
                clause.push(!x);
            } else if result.added_pairs.contains(&(j, i)) {
                clause.push(!s);
                clause.push(x);
            } else {
                clause.push(s);
            }
        }
        self.solver.add_clause(&clause);
    }
}

/// Fallback when no model is found within budget: one linear extension taken
/// twice, which adds every incomparable pair.
fn trivial_extension(leq: &[Vec<bool>]) -> ExtensionResult {
    let n = leq.len();
    let mut ext: Vec<usize> = (0..n).collect();
    ext.sort_by_key(|&a| ((0..n).filter(|&b| leq[b][a]).count(), a));
    let rank: Vec<usize> = {
        let mut r = vec![0; n];
        for (i, &a) in ext.iter().enumerate() {
            r[a] = i;
        }
        r
    };
    let added = incomparable_pairs(leq)
        .into_iter()
        .map(|(i, j)| if rank[i] < rank[j] { (i, j) } else { (j, i) })
        .collect();
    ExtensionResult { added_pairs: added, realizer: Realizer { extensions: vec![ext.clone(), ext] }, minimal: false }
}

/// Smallest `T ⊆ INC` making `≤ ∪ T` two-dimensional. The search first finds
/// any pair of extensions and then tightens the cardinality bound until the
/// solver proves no smaller `T` exists. Among the minimal sets, the
/// lexicographically smallest (by pair index, then orientation) is returned.
pub fn minimal_extension(leq: &[Vec<bool>], budget: &ExtensionBudget) -> ExtensionResult {
    let mut tracker = budget.start();
    let mut search = ExtensionSearch::new(leq);
    let mut best = match tracker.solve(&mut search.solver, &[]) {
        SolveResult::Sat => search.decode(),
        _ => return trivial_extension(leq),
    };
    loop {
        if best.k() == 0 {
            best.minimal = true;
            break;
        }
        let bound = search.at_most(best.k() - 1);
        match tracker.solve(&mut search.solver, &bound) {
            SolveResult::Sat => best = search.decode(),
            SolveResult::Unsat => {
                best.minimal = true;
                break;
            }
            SolveResult::Unknown => return best,
        }
    }
    canonicalize(&mut search, &mut tracker, best)
}

/// Greedy lexicographic minimization at the proven minimal size.
fn canonicalize(search: &mut ExtensionSearch, tracker: &mut Tracker, best: ExtensionResult) -> ExtensionResult {
    let k = best.k();
    let mut fixed = search.at_most(k);
    let mut chosen = 0;
    for p in 0..search.pairs.len() {
        if chosen == k {
            fixed.push(!Lit::pos(search.select[p]));
            continue;
        }
        let s = Lit::pos(search.select[p]);
        let x = search.first.var_of[search.pairs[p].0][search.pairs[p].1].unwrap();
        let mut placed = false;
        for extra in [[s, x], [s, !x]] {
            let mut trial = fixed.clone();
            trial.extend(extra);
            match tracker.solve(&mut search.solver, &trial) {
                SolveResult::Sat => {
                    fixed = trial;
                    chosen += 1;
                    placed = true;
                    break;
                }
                SolveResult::Unsat => {}
                SolveResult::Unknown => return best,
            }
        }
        if !placed {
            fixed.push(!s);
        }
    }
    match tracker.solve(&mut search.solver, &fixed) {
        SolveResult::Sat => ExtensionResult { minimal: best.minimal, ..search.decode() },
        _ => best,
    }
}

/// All distinct `T` of size `k` (with orientation) making `≤ ∪ T`
/// two-dimensional. The flag is `false` if the budget ran out early.
pub fn enumerate_minimal_extensions(
    leq: &[Vec<bool>],
    k: usize,
    budget: &ExtensionBudget,
) -> (Vec<ExtensionResult>, bool) {
    let mut tracker = budget.start();
    let mut search = ExtensionSearch::new(leq);
    let bound = search.at_most(k);
    let mut out: Vec<ExtensionResult> = Vec::new();
    loop {
        match tracker.solve(&mut search.solver, &bound) {
            SolveResult::Sat => {
                let r = search.decode();
                search.block(&r);
                if r.k() == k {
                    out.push(r);
                }
            }
            SolveResult::Unsat => break,
            SolveResult::Unknown => {
                out.sort_by(|a, b| a.added_pairs.cmp(&b.added_pairs));
                return (out, false);
            }
        }
    }
    out.sort_by(|a, b| a.added_pairs.cmp(&b.added_pairs));
    (out, true)
}

/// `POS(c) = (rank of c in <₁, rank of c in <₂)`.
pub fn realizer_embed(realizer: &Realizer) -> Layout {
    let ranks = realizer.ranks();
    let n = ranks.first().map_or(0, |r| r.len());
    Layout::new(
        (0..n)
            .map(|c| [ranks[0][c] as f64, ranks.get(1).map_or(ranks[0][c], |r| r[c]) as f64])
            .collect(),
    )
}

/// Turns the grid by 45° to the left and rescales:
/// `(x, y) ↦ (√2·(x − y), (x + y)/√2)`.
pub fn rotate_stretch(layout: &Layout) -> Layout {
    let s = std::f64::consts::SQRT_2;
    layout.linear_map([[s, -s], [1.0 / s, 1.0 / s]])
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct RealizerAdditivityReport {
    pub residual: f64,
    pub additive: bool,
}

/// Embeds the realizer and tests the result for additivity in `basis`.
pub fn check_realizer_additive_conflict(
    basis: &AdditiveBasis,
    extension: &ExtensionResult,
    tol: f64,
) -> Result<RealizerAdditivityReport> {
    let layout = rotate_stretch(&realizer_embed(&extension.realizer));
    let check = basis.is_additive(&layout, tol)?;
    Ok(RealizerAdditivityReport { residual: check.residual, additive: check.additive })
}

/// Convenience wrapper over a lattice's order.
pub fn lattice_minimal_extension(lat: &ConceptLattice, budget: &ExtensionBudget) -> ExtensionResult {
    minimal_extension(&lat.order_matrix(), budget)
}
