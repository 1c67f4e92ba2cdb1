//! Ideals, units, annihilators, determinants and Fitting ideals.

use serde::Serialize;

use super::ring::{FiniteZpk, Ring};
use super::zpk::{smith_zpk, ZpkSmith};

/// Matrix of y ↦ x·y: row i holds the coordinates of x·b_i.
pub fn multiplication_matrix<R: FiniteZpk>(ring: &R, x: &R::Elem) -> Vec<Vec<u64>> {
    ring.basis().iter().map(|b| ring.to_coords(&ring.mul(x, b))).collect()
}

fn multiplication_smith<R: FiniteZpk>(ring: &R, x: &R::Elem) -> ZpkSmith {
    smith_zpk(ring.zpk(), &multiplication_matrix(ring, x), ring.rank())
}

/// Inverse of x if it is a unit, verified by multiplication.
pub fn is_unit<R: FiniteZpk>(ring: &R, x: &R::Elem) -> Option<R::Elem> {
    let s = multiplication_smith(ring, x);
    let y = s.solve_left(&ring.to_coords(&ring.one()))?;
    let inv = ring.from_coords(&y);
    (ring.mul(x, &inv) == ring.one()).then_some(inv)
}

/// Some y with a·y = x, if x ∈ (a).
pub fn divide<R: FiniteZpk>(ring: &R, a: &R::Elem, x: &R::Elem) -> Option<R::Elem> {
    let y = ring.from_coords(&multiplication_smith(ring, a).solve_left(&ring.to_coords(x))?);
    (ring.mul(a, &y) == *x).then_some(y)
}

/// Annihilator of x in the finite ring, with its size and slack.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Annihilator {
    /// log_p |Ann(x)|.
    pub order_log: u32,
    /// Least c with Ann(x) ⊆ p^{k−c}·R; `None` if Ann(x) ⊄ p·R.
    pub slack: Option<u32>,
}

pub fn annihilator<R: FiniteZpk>(ring: &R, x: &R::Elem) -> Annihilator {
    let s = multiplication_smith(ring, x);
    Annihilator { order_log: s.left_kernel_log(), slack: s.max_valuation() }
}

/// Generators of Ann(x).
pub fn annihilator_generators<R: FiniteZpk>(ring: &R, x: &R::Elem) -> Vec<R::Elem> {
    multiplication_smith(ring, x).left_kernel().iter().map(|c| ring.from_coords(c)).collect()
}

/// Rows spanning the ideal (a_1, …, a_r) as a Z/p^k-module.
fn ideal_span<R: FiniteZpk>(ring: &R, gens: &[R::Elem]) -> Vec<Vec<u64>> {
    let basis = ring.basis();
    let mut rows = Vec::with_capacity(basis.len() * gens.len());
    for a in gens {
        for b in &basis {
            rows.push(ring.to_coords(&ring.mul(a, b)));
        }
    }
    if rows.is_empty() {
        rows.push(vec![0; ring.rank()]);
    }
    rows
}

pub fn ideal_contains<R: FiniteZpk>(ring: &R, gens: &[R::Elem], x: &R::Elem) -> bool {
    smith_zpk(ring.zpk(), &ideal_span(ring, gens), ring.rank()).solve_left(&ring.to_coords(x)).is_some()
}

/// Equality of the ideals generated by `a` and `b`.
pub fn ideal_equal<R: FiniteZpk>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> bool {
    let sa = smith_zpk(ring.zpk(), &ideal_span(ring, a), ring.rank());
    let sb = smith_zpk(ring.zpk(), &ideal_span(ring, b), ring.rank());
    a.iter().all(|x| sb.solve_left(&ring.to_coords(x)).is_some()) && b.iter().all(|x| sa.solve_left(&ring.to_coords(x)).is_some())
}

/// log_p |R/(gens)|.
pub fn quotient_order_log<R: FiniteZpk>(ring: &R, gens: &[R::Elem]) -> u32 {
    smith_zpk(ring.zpk(), &ideal_span(ring, gens), ring.rank()).cokernel_log()
}

/// Generators of the product ideal.
pub fn ideal_product<R: Ring>(ring: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    a.iter().flat_map(|x| b.iter().map(move |y| ring.mul(x, y))).collect()
}

/// Determinant by Bird's division-free algorithm.
pub fn determinant<R: Ring>(ring: &R, m: &[Vec<R::Elem>]) -> R::Elem {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    let mut x: Vec<Vec<R::Elem>> = m.to_vec();
    for _ in 1..n {
        // μ(X): strictly upper part of X, diagonal −(sum of later diagonal entries).
        let mut mu = vec![vec![ring.zero(); n]; n];
        let mut tail = ring.zero();
        for i in (0..n).rev() {
            mu[i][i] = ring.neg(&tail);
            tail = ring.add(&tail, &x[i][i]);
            for j in i + 1..n {
                mu[i][j] = x[i][j].clone();
            }
        }
        x = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut acc = ring.zero();
                        for (k, row) in m.iter().enumerate().skip(i) {
                            if !ring.is_zero(&mu[i][k]) {
                                acc = ring.add(&acc, &ring.mul(&mu[i][k], &row[j]));
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
    }
    if n % 2 == 0 {
        ring.neg(&x[0][0])
    } else {
        x[0][0].clone()
    }
}

/// The 0-th Fitting ideal of a presented module.
#[derive(Clone, Debug, PartialEq)]
pub struct FittingIdeal<E> {
    pub generators: Vec<E>,
    /// Fewer relations than generators: the ideal is zero.
    pub underdetermined: bool,
}

/// Fitting ideal of the module with generators = columns and relations = rows.
pub fn fitting_ideal<R: Ring>(ring: &R, relations: &[Vec<R::Elem>], ngens: usize) -> FittingIdeal<R::Elem> {
    if ngens == 0 {
        return FittingIdeal { generators: vec![ring.one()], underdetermined: false };
    }
    if relations.len() < ngens {
        return FittingIdeal { generators: vec![ring.zero()], underdetermined: true };
    }
    let mut generators = Vec::new();
    for rows in combinations(relations.len(), ngens) {
        let minor: Vec<Vec<R::Elem>> = rows.iter().map(|&r| relations[r].clone()).collect();
        let d = determinant(ring, &minor);
        if !ring.is_zero(&d) && !generators.contains(&d) {
            generators.push(d);
        }
    }
    if generators.is_empty() {
        generators.push(ring.zero());
    }
    FittingIdeal { generators, underdetermined: false }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Block-diagonal presentation of M ⊕ N.
pub fn direct_sum<R: Ring>(ring: &R, a: &[Vec<R::Elem>], a_gens: usize, b: &[Vec<R::Elem>], b_gens: usize) -> Vec<Vec<R::Elem>> {
    let mut out = Vec::new();
    for row in a {
        let mut r = row.clone();
        r.extend(std::iter::repeat(ring.zero()).take(b_gens));
        out.push(r);
    }
    for row in b {
        let mut r = vec![ring.zero(); a_gens];
        r.extend(row.iter().cloned());
        out.push(r);
    }
    out
}

pub fn mat_mul<R: Ring>(ring: &R, a: &[Vec<R::Elem>], b: &[Vec<R::Elem>]) -> Vec<Vec<R::Elem>> {
    let ncols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..ncols).map(|j| row.iter().zip(b).fold(ring.zero(), |acc, (x, brow)| ring.add(&acc, &ring.mul(x, &brow[j])))).collect()
        })
        .collect()
}
