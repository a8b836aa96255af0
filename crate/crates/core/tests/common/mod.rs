//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use latflux_core::lattice::orders_isomorphic;
use rand::Rng;

pub type Order = Vec<Vec<bool>>;

/// Calls `f` with every linear extension (bottom first); stops when `f` returns true.
pub fn any_linear_extension(leq: &Order, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    fn rec(leq: &Order, placed: &mut Vec<usize>, used: &mut Vec<bool>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let n = leq.len();
        if placed.len() == n {
            return f(placed);
        }
        for x in 0..n {
            if !used[x] && (0..n).all(|y| y == x || !leq[y][x] || used[y]) {
                used[x] = true;
                placed.push(x);
                if rec(leq, placed, used, f) {
                    return true;
                }
                placed.pop();
                used[x] = false;
            }
        }
        false
    }
    rec(leq, &mut Vec::new(), &mut vec![false; leq.len()], f)
}

pub fn is_transitive(rel: &Order) -> bool {
    let n = rel.len();
    (0..n).all(|a| (0..n).all(|b| !rel[a][b] || (0..n).all(|c| !rel[b][c] || rel[a][c])))
}

/// Dimension ≤ 2: some linear extension whose conjugate (every incomparable
/// pair reversed) is again a linear order.
pub fn two_dimensional_brute(leq: &Order) -> bool {
    let n = leq.len();
    any_linear_extension(leq, &mut |ext| {
        let mut rank = vec![0; n];
        for (i, &x) in ext.iter().enumerate() {
            rank[x] = i;
        }
        let conj: Order = (0..n)
            .map(|a| (0..n).map(|b| a == b || leq[a][b] || (!leq[b][a] && rank[a] > rank[b])).collect())
            .collect();
        is_transitive(&conj)
    })
}

pub fn incomparable(leq: &Order) -> Vec<(usize, usize)> {
    let n = leq.len();
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| !leq[i][j] && !leq[j][i]).collect()
}

/// Smallest oriented `T ⊆ INC` with `≤ ∪ T` an order of dimension ≤ 2, and
/// the number of such `T` of that size.
pub fn minimal_extension_brute(leq: &Order) -> (usize, usize) {
    let inc = incomparable(leq);
    for k in 0..=inc.len() {
        let mut count = 0;
        let mut choose = vec![];
        subsets(inc.len(), k, 0, &mut choose, &mut |sel| {
            for orient in 0..(1u32 << k) {
                let mut q = leq.clone();
                for (bit, &p) in sel.iter().enumerate() {
                    let (a, b) = inc[p];
                    if orient >> bit & 1 == 1 { q[a][b] = true } else { q[b][a] = true }
                }
                if is_transitive(&q) && two_dimensional_brute(&q) {
                    count += 1;
                }
            }
        });
        if count > 0 {
            return (k, count);
        }
    }
    unreachable!("adding all pairs along a linear extension always works")
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == k {
        f(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        subsets(n, k, i + 1, cur, f);
        cur.pop();
    }
}

/// Random order on `n` elements from a random DAG along the index order.
pub fn random_order<R: Rng>(rng: &mut R, n: usize, p: f64) -> Order {
    let mut r: Order = (0..n).map(|i| (0..n).map(|j| i == j || (i < j && rng.random_bool(p))).collect()).collect();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if r[i][k] && r[k][j] {
                    r[i][j] = true;
                }
            }
        }
    }
    r
}

fn has_all_joins(leq: &Order) -> bool {
    let n = leq.len();
    (0..n).all(|a| {
        (0..n).all(|b| {
            let ups: Vec<usize> = (0..n).filter(|&c| leq[a][c] && leq[b][c]).collect();
            ups.iter().any(|&j| ups.iter().all(|&c| leq[j][c]))
        })
    })
}

/// All lattices with exactly `n` elements up to isomorphism: bottom 0,
/// top n−1, and every order on the inner elements compatible with the index order.
pub fn lattices_of_size(n: usize) -> Vec<Order> {
    if n <= 2 {
        return vec![(0..n).map(|i| (0..n).map(|j| i <= j).collect()).collect()];
    }
    let inner = n - 2;
    let pairs: Vec<(usize, usize)> = (0..inner).flat_map(|i| (i + 1..inner).map(move |j| (i, j))).collect();
    let mut out: Vec<Order> = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut r: Order = vec![vec![false; n]; n];
        for i in 0..n {
            r[0][i] = true;
            r[i][n - 1] = true;
            r[i][i] = true;
        }
        for (bit, &(i, j)) in pairs.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                r[i + 1][j + 1] = true;
            }
        }
        if !is_transitive(&r) || !has_all_joins(&r) {
            continue;
        }
        if !out.iter().any(|o| orders_isomorphic(o, &r)) {
            out.push(r);
        }
    }
    out
}
