//! Smith form over the local ring Z/p^k and the linear algebra built on it.

use super::ring::{Ring, ZMod};

/// D = L·A·R with D diagonal (entries p^{v_j}) and L, R invertible.
#[derive(Clone, Debug)]
pub struct ZpkSmith {
    pub z: ZMod,
    pub rows: usize,
    pub cols: usize,
    /// Valuations of the min(rows, cols) diagonal entries; k encodes zero.
    pub valuations: Vec<u32>,
    pub l: Vec<Vec<u64>>,
    pub r: Vec<Vec<u64>>,
}

fn identity(n: usize) -> Vec<Vec<u64>> {
    (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
}

pub fn smith_zpk(z: ZMod, a: &[Vec<u64>], ncols: usize) -> ZpkSmith {
    let m = a.len();
    let n = ncols;
    let mut a: Vec<Vec<u64>> = a.iter().map(|row| row.iter().map(|&x| x % z.modulus()).collect()).collect();
    let mut l = identity(m);
    let mut r = identity(n);
    let rank = m.min(n);
    let mut valuations = Vec::with_capacity(rank);
    for t in 0..rank {
        let mut best: Option<(usize, usize, u32)> = None;
        for (i, row) in a.iter().enumerate().skip(t) {
            for (j, &x) in row.iter().enumerate().skip(t) {
                let v = z.valuation(x);
                if v < z.k() && best.map_or(true, |b| v < b.2) {
                    best = Some((i, j, v));
                    if v == 0 {
                        break;
                    }
                }
            }
            if best.is_some_and(|b| b.2 == 0) {
                break;
            }
        }
        let Some((pi, pj, v)) = best else {
            valuations.extend(std::iter::repeat(z.k()).take(rank - t));
            break;
        };
        a.swap(t, pi);
        l.swap(t, pi);
        if pj != t {
            for row in a.iter_mut().chain(r.iter_mut()) {
                row.swap(t, pj);
            }
        }
        // Normalize the pivot to exactly p^v.
        let pv = z.p().pow(v);
        let unit = a[t][t] / pv;
        let uinv = z.inv(unit).expect("unit part is invertible");
        for x in a[t].iter_mut().chain(l[t].iter_mut()) {
            *x = z.mul(x, &uinv);
        }
        for i in 0..m {
            if i == t || a[i][t] == 0 {
                continue;
            }
            let c = a[i][t] / pv;
            let (src_a, src_l) = (a[t].clone(), l[t].clone());
            for (x, y) in a[i].iter_mut().zip(&src_a) {
                *x = z.sub(x, &z.mul(&c, y));
            }
            for (x, y) in l[i].iter_mut().zip(&src_l) {
                *x = z.sub(x, &z.mul(&c, y));
            }
        }
        for j in 0..n {
            if j == t || a[t][j] == 0 {
                continue;
            }
            let c = a[t][j] / pv;
            for row in a.iter_mut().chain(r.iter_mut()) {
                let s = row[t];
                row[j] = z.sub(&row[j], &z.mul(&c, &s));
            }
        }
        valuations.push(v);
    }
    ZpkSmith { z, rows: m, cols: n, valuations, l, r }
}

fn vec_mat(z: &ZMod, x: &[u64], m: &[Vec<u64>], ncols: usize) -> Vec<u64> {
    let mut out = vec![0u64; ncols];
    for (xi, row) in x.iter().zip(m) {
        if *xi == 0 {
            continue;
        }
        for (o, y) in out.iter_mut().zip(row) {
            *o = z.add(o, &z.mul(xi, y));
        }
    }
    out
}

impl ZpkSmith {
    /// x with x·A = b, if one exists.
    pub fn solve_left(&self, b: &[u64]) -> Option<Vec<u64>> {
        let z = &self.z;
        let br = vec_mat(z, b, &self.r, self.cols);
        let mut y = vec![0u64; self.rows];
        for (j, &c) in br.iter().enumerate() {
            match self.valuations.get(j) {
                Some(&v) if v < z.k() => {
                    if z.valuation(c) < v {
                        return None;
                    }
                    y[j] = c / z.p().pow(v);
                }
                _ => {
                    if c != 0 {
                        return None;
                    }
                }
            }
        }
        Some(vec_mat(z, &y, &self.l, self.rows))
    }

    /// Generators of {x : x·A = 0}.
    pub fn left_kernel(&self) -> Vec<Vec<u64>> {
        let z = &self.z;
        let mut out = Vec::new();
        for j in 0..self.rows {
            let scale = match self.valuations.get(j) {
                Some(&0) => continue,
                Some(&v) => z.p().pow(z.k() - v) % z.modulus(),
                None => 1,
            };
            let mut y = vec![0u64; self.rows];
            y[j] = scale;
            let x = vec_mat(z, &y, &self.l, self.rows);
            if x.iter().any(|&c| c != 0) {
                out.push(x);
            }
        }
        out
    }

    /// log_p of |(Z/p^k)^cols / row span|.
    pub fn cokernel_log(&self) -> u32 {
        (0..self.cols).map(|j| self.valuations.get(j).copied().unwrap_or(self.z.k())).sum()
    }

    /// log_p of |{x : x·A = 0}|.
    pub fn left_kernel_log(&self) -> u32 {
        let diag: u32 = self.valuations.iter().sum();
        diag + (self.rows.saturating_sub(self.cols) as u32) * self.z.k()
    }

    /// Largest diagonal valuation; `None` when some diagonal entry vanishes.
    pub fn max_valuation(&self) -> Option<u32> {
        if self.rows > self.cols || self.valuations.iter().any(|&v| v == self.z.k()) {
            return None;
        }
        Some(self.valuations.iter().copied().max().unwrap_or(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat_mul(z: &ZMod, a: &[Vec<u64>], b: &[Vec<u64>], ncols: usize) -> Vec<Vec<u64>> {
        a.iter().map(|row| vec_mat(z, row, b, ncols)).collect()
    }

    #[test]
    fn decomposition_reconstructs_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &(p, k) in &[(2u64, 5u32), (3, 4), (5, 2)] {
            let z = ZMod::new(p, k);
            for _ in 0..50 {
                let (m, n) = (rng.gen_range(1..5), rng.gen_range(1..5));
                let a: Vec<Vec<u64>> =
                    (0..m).map(|_| (0..n).map(|_| z.mul(&rng.gen_range(0..z.modulus()), &p.pow(rng.gen_range(0..k)))).collect()).collect();
                let s = smith_zpk(z, &a, n);
                let d = mat_mul(&z, &mat_mul(&z, &s.l, &a, n), &s.r, n);
                for i in 0..m {
                    for j in 0..n {
                        let expect = if i == j && s.valuations[i] < k { p.pow(s.valuations[i]) } else { 0 };
                        assert_eq!(d[i][j], expect);
                    }
                }
                // Solvability agrees with brute force on small rings.
                if z.modulus().pow(m as u32) <= 4096 {
                    let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..z.modulus())).collect();
                    let mut found = false;
                    let mut kernel_size = 0u64;
                    for code in 0..z.modulus().pow(m as u32) {
                        let x: Vec<u64> = (0..m).map(|i| (code / z.modulus().pow(i as u32)) % z.modulus()).collect();
                        let img = vec_mat(&z, &x, &a, n);
                        found |= img == b;
                        kernel_size += u64::from(img.iter().all(|&c| c == 0));
                    }
                    let sol = s.solve_left(&b);
                    assert_eq!(sol.is_some(), found);
                    if let Some(x) = sol {
                        assert_eq!(vec_mat(&z, &x, &a, n), b);
                    }
                    assert_eq!(kernel_size, p.pow(s.left_kernel_log()));
                    for x in s.left_kernel() {
                        assert!(vec_mat(&z, &x, &a, n).iter().all(|&c| c == 0));
                    }
                }
            }
        }
    }
}
