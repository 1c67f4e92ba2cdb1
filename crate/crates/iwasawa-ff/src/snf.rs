//! Smith normal form over Z with the right-hand transform.

/// Result of `D = U·A·V`: the diagonal, V and V⁻¹ (U is not tracked).
#[derive(Clone, Debug)]
pub struct IntSmith {
    /// Diagonal entries d_0 | d_1 | …, length min(rows, cols); zeros last.
    pub diag: Vec<i128>,
    pub v: Vec<Vec<i128>>,
    pub v_inv: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

fn ck(x: Option<i128>) -> i128 {
    x.expect("integer overflow in Smith normal form")
}

/// Smith form of an integer matrix given by rows.
pub fn smith(rows: &[Vec<i128>], ncols: usize) -> IntSmith {
    let m = rows.len();
    let n = ncols;
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let mut v = identity(n);
    let mut vi = identity(n);

    let col_add = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vi: &mut Vec<Vec<i128>>, src: usize, dst: usize, c: i128| {
        // column dst += c · column src
        for row in a.iter_mut() {
            row[dst] = ck(row[dst].checked_add(ck(c.checked_mul(row[src]))));
        }
        for row in v.iter_mut() {
            row[dst] = ck(row[dst].checked_add(ck(c.checked_mul(row[src]))));
        }
        // V⁻¹: row src −= c · row dst
        let dst_row = vi[dst].clone();
        for (x, y) in vi[src].iter_mut().zip(dst_row) {
            *x = ck(x.checked_sub(ck(c.checked_mul(y))));
        }
    };
    let col_swap = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, vi: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vi.swap(i, j);
    };

    let r = m.min(n);
    let mut t = 0;
    while t < r {
        // Pivot: nonzero entry of least absolute value in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if pj != t {
            col_swap(&mut a, &mut v, &mut vi, t, pj);
        }
        let piv = a[t][t];
        let mut clean = true;
        for i in t + 1..m {
            let qt = a[i][t] / piv;
            if qt != 0 {
                let src = a[t].clone();
                for (x, y) in a[i].iter_mut().zip(src) {
                    *x = ck(x.checked_sub(ck(qt.checked_mul(y))));
                }
            }
            if a[i][t] != 0 {
                clean = false;
            }
        }
        for j in t + 1..n {
            let qt = a[t][j] / piv;
            if qt != 0 {
                col_add(&mut a, &mut v, &mut vi, t, j, -qt);
            }
            if a[t][j] != 0 {
                clean = false;
            }
        }
        if !clean {
            continue;
        }
        // Enforce divisibility of the trailing block by the pivot.
        let mut bad_row = None;
        'outer: for i in t + 1..m {
            for j in t + 1..n {
                if a[i][j] % piv != 0 {
                    bad_row = Some(i);
                    break 'outer;
                }
            }
        }
        if let Some(i) = bad_row {
            let src = a[i].clone();
            for (x, y) in a[t].iter_mut().zip(src) {
                *x = ck(x.checked_add(y));
            }
            continue;
        }
        if a[t][t] < 0 {
            for row in a.iter_mut() {
                row[t] = -row[t];
            }
            for row in v.iter_mut() {
                row[t] = -row[t];
            }
            for x in vi[t].iter_mut() {
                *x = -*x;
            }
        }
        t += 1;
    }
    let diag = (0..r).map(|i| a[i][i]).collect();
    IntSmith { diag, v, v_inv: vi }
}

/// Row vector times matrix over Z.
pub fn vec_mat(x: &[i128], m: &[Vec<i128>]) -> Vec<i128> {
    let ncols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0i128; ncols];
    for (xi, row) in x.iter().zip(m) {
        if *xi == 0 {
            continue;
        }
        for (o, r) in out.iter_mut().zip(row) {
            *o = ck(o.checked_add(ck(xi.checked_mul(*r))));
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    a.iter().map(|row| vec_mat(row, b)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn det(m: &[Vec<i128>]) -> i128 {
        let n = m.len();
        if n == 0 {
            return 1;
        }
        let mut total = 0;
        for j in 0..n {
            let minor: Vec<Vec<i128>> =
                m[1..].iter().map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect()).collect();
            let s = if j % 2 == 0 { 1 } else { -1 };
            total += s * m[0][j] * det(&minor);
        }
        total
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![vec![]];
        }
        if n < k {
            return vec![];
        }
        let mut out = subsets(n - 1, k);
        for mut s in subsets(n - 1, k - 1) {
            s.push(n - 1);
            out.push(s);
        }
        out
    }

    /// Oracle: d_1⋯d_i = gcd of the i×i minors.
    fn minor_gcds(m: &[Vec<i128>]) -> Vec<i128> {
        let n = m.len();
        (1..=n)
            .map(|k| {
                let mut g = 0i128;
                for rs in subsets(n, k) {
                    for cs in subsets(n, k) {
                        let sub: Vec<Vec<i128>> = rs.iter().map(|&r| cs.iter().map(|&c| m[r][c]).collect()).collect();
                        g = num_integer::Integer::gcd(&g, &det(&sub));
                    }
                }
                g
            })
            .collect()
    }

    #[test]
    fn agrees_with_minor_gcd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let m: Vec<Vec<i128>> = (0..4).map(|_| (0..4).map(|_| rng.gen_range(-6..=6)).collect()).collect();
            let s = smith(&m, 4);
            let gcds = minor_gcds(&m);
            let mut prod = 1i128;
            for (i, d) in s.diag.iter().enumerate() {
                prod *= d;
                assert_eq!(prod, gcds[i], "matrix {m:?}");
            }
            for w in s.diag.windows(2) {
                if w[1] != 0 {
                    assert_eq!(w[1] % w[0], 0);
                }
            }
            let vv = mat_mul(&s.v, &s.v_inv);
            assert_eq!(vv, identity(4));
        }
    }
}
