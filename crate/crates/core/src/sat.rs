//! A small CDCL satisfiability solver: two watched literals, first-UIP clause
//! learning, VSIDS branching, Luby restarts and solving under assumptions.
//! Also reads and writes DIMACS CNF for use with external solvers.

use std::fmt::Write as _;
use std::ops::Not;
use std::time::Instant;

use crate::error::{Error, Result};

pub type Var = u32;

/// A literal: variable index times two, plus one when negated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Self {
        Lit(var << 1 | negated as u32)
    }

    pub fn pos(var: Var) -> Self {
        Lit::new(var, false)
    }

    pub fn neg(var: Var) -> Self {
        Lit::new(var, true)
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    fn code(self) -> usize {
        self.0 as usize
    }

    /// DIMACS integer (1-based, sign for polarity).
    pub fn to_dimacs(self) -> i64 {
        let v = self.var() as i64 + 1;
        if self.is_negated() {
            -v
        } else {
            v
        }
    }

    pub fn from_dimacs(x: i64) -> Option<Self> {
        (x != 0).then(|| Lit::new((x.unsigned_abs() - 1) as Var, x < 0))
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The conflict or time budget ran out.
    Unknown,
}

/// Limits for one `solve` call.
#[derive(Clone, Copy, Debug, Default)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub decisions: u64,
    pub propagations: u64,
    pub conflicts: u64,
    pub restarts: u64,
}

const UNDEF: i8 = 0;
const TRUE: i8 = 1;
const FALSE: i8 = -1;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

/// Max-heap of variables by activity, ties broken by smaller index.
struct VarHeap {
    heap: Vec<Var>,
    index: Vec<Option<usize>>,
}

impl VarHeap {
    fn new() -> Self {
        Self { heap: Vec::new(), index: Vec::new() }
    }

    fn before(act: &[f64], a: Var, b: Var) -> bool {
        let (x, y) = (act[a as usize], act[b as usize]);
        x > y || (x == y && a < b)
    }

    fn contains(&self, v: Var) -> bool {
        self.index.get(v as usize).is_some_and(|i| i.is_some())
    }

    fn grow(&mut self, n: usize) {
        self.index.resize(n, None);
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::before(act, v, self.heap[parent]) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.index[self.heap[i] as usize] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.index[v as usize] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && Self::before(act, self.heap[r], self.heap[l]) { r } else { l };
            if !Self::before(act, self.heap[child], v) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.index[self.heap[i] as usize] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.index[v as usize] = Some(i);
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.index[v as usize] = Some(i);
        self.up(i, act);
    }

    fn bumped(&mut self, v: Var, act: &[f64]) {
        if let Some(i) = self.index[v as usize] {
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.index[top as usize] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.index[last as usize] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let (mut size, mut seq) = (1u64, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub struct Solver {
    clauses: Vec<Clause>,
    original: Vec<Vec<Lit>>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    var_inc: f64,
    cla_inc: f64,
    learnts: usize,
    max_learnts: f64,
    ok: bool,
    model: Vec<bool>,
    stats: Stats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Self {
            clauses: Vec::new(),
            original: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            heap: VarHeap::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            var_inc: 1.0,
            cla_inc: 1.0,
            learnts: 0,
            max_learnts: 4000.0,
            ok: true,
            model: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn stats(&self) -> Stats {
        self.stats
    }

    pub fn new_var(&mut self) -> Var {
        let v = self.assigns.len() as Var;
        self.assigns.push(UNDEF);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(true);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.heap.grow(self.assigns.len());
        self.heap.insert(v, &self.activity);
        v
    }

    fn value(&self, l: Lit) -> i8 {
        let a = self.assigns[l.var() as usize];
        if l.is_negated() {
            -a
        } else {
            a
        }
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var() as usize;
        self.assigns[v] = if l.is_negated() { FALSE } else { TRUE };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, level: usize) {
        if self.decision_level() <= level {
            return;
        }
        let start = self.trail_lim[level];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var() as usize;
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.polarity[v] = l.is_negated();
            self.heap.insert(l.var(), &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(level);
        self.qhead = start;
    }

    /// Adds a permanent clause. Returns `false` once the formula is known to
    /// be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        for l in lits {
            while l.var() as usize >= self.num_vars() {
                self.new_var();
            }
        }
        self.original.push(lits.to_vec());
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) || c.iter().any(|&l| self.value(l) == TRUE) {
            return true;
        }
        c.retain(|&l| self.value(l) != FALSE);
        match c.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(c[0], None);
                self.ok = self.propagate().is_none();
                self.ok
            }
            _ => {
                self.attach(c, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let cref = self.clauses.len();
        self.watches[lits[0].code()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].code()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts += 1;
        }
        cref
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == TRUE {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let cref = w.cref;
                if self.clauses[cref].deleted {
                    continue;
                }
                {
                    let lits = &mut self.clauses[cref].lits;
                    if lits[0] == false_lit {
                        lits.swap(0, 1);
                    }
                }
                let first = self.clauses[cref].lits[0];
                if first != w.blocker && self.value(first) == TRUE {
                    ws[j] = Watcher { cref, blocker: first };
                    j += 1;
                    continue;
                }
                let len = self.clauses[cref].lits.len();
                let mut moved = false;
                for k in 2..len {
                    let l = self.clauses[cref].lits[k];
                    if self.value(l) != FALSE {
                        self.clauses[cref].lits.swap(1, k);
                        self.watches[l.code()].push(Watcher { cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher { cref, blocker: first };
                j += 1;
                if self.value(first) == FALSE {
                    conflict = Some(cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(cref));
                }
            }
            ws.truncate(j);
            // watchers pushed for false_lit during the scan cannot exist: a
            // clause only moves its watch to a non-false literal
            let pushed = std::mem::replace(&mut self.watches[false_lit.code()], ws);
            self.watches[false_lit.code()].extend(pushed);
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for c in self.clauses.iter_mut().filter(|c| c.learnt) {
                c.activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, usize) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut index = self.trail.len();
        loop {
            self.bump_clause(confl);
            let start = if p.is_some() { 1 } else { 0 };
            let lits = self.clauses[confl].lits.clone();
            for &q in &lits[start..] {
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump_var(q.var());
                    self.seen[v] = true;
                    if self.level[v] as usize >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                index -= 1;
                if self.seen[self.trail[index].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[index];
            p = Some(lit);
            self.seen[lit.var() as usize] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var() as usize].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict has a UIP");

        // local minimization: drop literals implied by the rest
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.reason[q.var() as usize] {
                None => false,
                Some(r) => self.clauses[r].lits[1..]
                    .iter()
                    .all(|l| self.seen[l.var() as usize] || self.level[l.var() as usize] == 0),
            };
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &learnt {
            self.seen[q.var() as usize] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize] as usize
        };
        (learnt, bt)
    }

    fn locked(&self, cref: usize) -> bool {
        let l = self.clauses[cref].lits[0];
        self.value(l) == TRUE && self.reason[l.var() as usize] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut cands: Vec<usize> = (0..self.clauses.len())
            .filter(|&i| {
                let c = &self.clauses[i];
                c.learnt && !c.deleted && c.lits.len() > 2
            })
            .collect();
        cands.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .total_cmp(&self.clauses[b].activity)
                .then(a.cmp(&b))
        });
        for &cref in &cands[..cands.len() / 2] {
            if !self.locked(cref) {
                self.clauses[cref].deleted = true;
                self.clauses[cref].lits = Vec::new();
                self.learnts -= 1;
            }
        }
        for ws in &mut self.watches {
            ws.retain(|w| !self.clauses[w.cref].deleted);
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(v, self.polarity[v as usize]));
            }
        }
        None
    }

    fn out_of_budget(&self, start_conflicts: u64, budget: &Budget) -> bool {
        budget
            .conflicts
            .is_some_and(|c| self.stats.conflicts - start_conflicts >= c)
            || budget.deadline.is_some_and(|d| Instant::now() >= d)
    }

    fn search(&mut self, nof_conflicts: u64, assumptions: &[Lit], start: u64, budget: &Budget) -> SolveResult {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return SolveResult::Unsat;
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
            } else {
                if local >= nof_conflicts || self.out_of_budget(start, budget) {
                    self.cancel_until(0);
                    return SolveResult::Unknown;
                }
                if self.learnts as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let p = assumptions[self.decision_level()];
                    match self.value(p) {
                        TRUE => self.trail_lim.push(self.trail.len()),
                        FALSE => {
                            self.cancel_until(0);
                            return SolveResult::Unsat;
                        }
                        _ => {
                            next = Some(p);
                            break;
                        }
                    }
                }
                let next = match next.or_else(|| self.pick_branch()) {
                    Some(l) => l,
                    None => return SolveResult::Sat,
                };
                self.stats.decisions += 1;
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    /// Solves under `assumptions` (literals forced true for this call only).
    pub fn solve_with(&mut self, assumptions: &[Lit], budget: Budget) -> SolveResult {
        for l in assumptions {
            while l.var() as usize >= self.num_vars() {
                self.new_var();
            }
        }
        if !self.ok {
            return SolveResult::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }
        let start = self.stats.conflicts;
        let mut restart = 0;
        loop {
            let limit = (luby(2.0, restart) * 100.0) as u64;
            match self.search(limit, assumptions, start, &budget) {
                SolveResult::Sat => {
                    self.model = self.assigns.iter().map(|&a| a == TRUE).collect();
                    self.cancel_until(0);
                    return SolveResult::Sat;
                }
                SolveResult::Unsat => {
                    self.cancel_until(0);
                    return SolveResult::Unsat;
                }
                SolveResult::Unknown => {
                    if self.out_of_budget(start, &budget) {
                        return SolveResult::Unknown;
                    }
                    restart += 1;
                    self.stats.restarts += 1;
                }
            }
        }
    }

    pub fn solve(&mut self) -> SolveResult {
        self.solve_with(&[], Budget::default())
    }

    /// Value of `v` in the last model.
    pub fn model_value(&self, v: Var) -> bool {
        self.model.get(v as usize).copied().unwrap_or(false)
    }

    pub fn model(&self) -> &[bool] {
        &self.model
    }

    /// The clauses added so far, in DIMACS CNF.
    pub fn to_dimacs(&self) -> String {
        write_dimacs(self.num_vars(), &self.original)
    }
}

pub fn write_dimacs(num_vars: usize, clauses: &[Vec<Lit>]) -> String {
    let mut out = format!("p cnf {} {}\n", num_vars, clauses.len());
    for c in clauses {
        for l in c {
            let _ = write!(out, "{} ", l.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

/// Parses DIMACS CNF into `(num_vars, clauses)`.
pub fn parse_dimacs(text: &str) -> Result<(usize, Vec<Vec<Lit>>)> {
    let mut num_vars = 0;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('p') {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 3 || parts[0] != "cnf" {
                return Err(Error::Parse { line: i + 1, message: "malformed problem line".into() });
            }
            num_vars = parts[1]
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, message: "bad variable count".into() })?;
            continue;
        }
        for tok in line.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, message: format!("bad literal `{tok}`") })?;
            match Lit::from_dimacs(x) {
                Some(l) => {
                    num_vars = num_vars.max(l.var() as usize + 1);
                    current.push(l);
                }
                None => clauses.push(std::mem::take(&mut current)),
            }
        }
    }
    if !current.is_empty() {
        clauses.push(current);
    }
    Ok((num_vars, clauses))
}

/// Parses a model as printed by common solvers (`v 1 -2 3 0` lines, or a
/// bare list of signed integers). Returns the true/false value per variable.
pub fn parse_model(text: &str, num_vars: usize) -> Result<Vec<bool>> {
    let mut model = vec![false; num_vars];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let x: i64 = tok
                .parse()
                .map_err(|_| Error::Parse { line: i + 1, message: format!("bad literal `{tok}`") })?;
            if let Some(l) = Lit::from_dimacs(x) {
                if let Some(slot) = model.get_mut(l.var() as usize) {
                    *slot = !l.is_negated();
                }
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    fn satisfies(model: &[bool], clauses: &[Vec<Lit>]) -> bool {
        clauses
            .iter()
            .all(|c| c.iter().any(|l| model[l.var() as usize] != l.is_negated()))
    }

    fn brute_force(num_vars: usize, clauses: &[Vec<Lit>]) -> bool {
        (0..1u64 << num_vars).any(|bits| {
            let m: Vec<bool> = (0..num_vars).map(|i| bits >> i & 1 == 1).collect();
            satisfies(&m, clauses)
        })
    }

    #[test]
    fn trivial_instances() {
        let mut s = Solver::new();
        assert_eq!(s.solve(), SolveResult::Sat);
        s.add_clause(&lits(&[1]));
        s.add_clause(&lits(&[-1, 2]));
        assert_eq!(s.solve(), SolveResult::Sat);
        assert!(s.model_value(1));
        assert!(!s.add_clause(&lits(&[-2])));
        assert_eq!(s.solve(), SolveResult::Unsat);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 5 pigeons, 4 holes
        let (p, h) = (5, 4);
        let var = |i: usize, j: usize| (i * h + j) as Var;
        let mut s = Solver::new();
        for i in 0..p {
            let c: Vec<Lit> = (0..h).map(|j| Lit::pos(var(i, j))).collect();
            s.add_clause(&c);
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&[Lit::neg(var(a, j)), Lit::neg(var(b, j))]);
                }
            }
        }
        assert_eq!(s.solve(), SolveResult::Unsat);
    }

    #[test]
    fn agrees_with_brute_force_on_random_3sat() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.random_range(3..=10);
            let m = rng.random_range(1..=45);
            let clauses: Vec<Vec<Lit>> = (0..m)
                .map(|_| {
                    (0..3)
                        .map(|_| Lit::new(rng.random_range(0..n) as Var, rng.random_bool(0.5)))
                        .collect()
                })
                .collect();
            let mut s = Solver::new();
            for c in &clauses {
                s.add_clause(c);
            }
            let r = s.solve();
            assert_eq!(r == SolveResult::Sat, brute_force(n, &clauses));
            if r == SolveResult::Sat {
                assert!(satisfies(s.model(), &clauses));
            }
        }
    }

    #[test]
    fn assumptions_are_temporary() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, 2]));
        s.add_clause(&lits(&[-1, 3]));
        assert_eq!(s.solve_with(&lits(&[-2, -3]), Budget::default()), SolveResult::Unsat);
        assert_eq!(s.solve_with(&lits(&[-2]), Budget::default()), SolveResult::Sat);
        assert!(s.model_value(0) && s.model_value(2));
        assert_eq!(s.solve(), SolveResult::Sat);
    }

    #[test]
    fn dimacs_round_trip() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, -3]));
        s.add_clause(&lits(&[2]));
        let text = s.to_dimacs();
        assert_eq!(text, "p cnf 3 2\n1 -3 0\n2 0\n");
        let (n, clauses) = parse_dimacs(&text).unwrap();
        assert_eq!(n, 3);
        assert_eq!(clauses, vec![lits(&[1, -3]), lits(&[2])]);
        assert_eq!(parse_model("s SATISFIABLE\nv 1 -2 3 0\n", 3).unwrap(), vec![true, false, true]);
    }

    #[test]
    fn luby_sequence() {
        let seq: Vec<f64> = (0..7).map(|i| luby(2.0, i)).collect();
        assert_eq!(seq, vec![1.0, 1.0, 2.0, 1.0, 1.0, 2.0, 4.0]);
    }
}
