use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::field::Fq;
use super::poly::FqPoly;

const SPLIT_SEED: u64 = 0x1f2e_3d4c_5b6a_7988;

/// Square-free decomposition: pairs (g_i, i) with f = ∏ g_i^i, g_i square-free and coprime.
pub fn squarefree_decomposition(f: &FqPoly) -> Result<Vec<(FqPoly, usize)>> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_text()));
    }
    let mut out = Vec::new();
    sqf_rec(f, 1, &mut out)?;
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}

fn sqf_rec(f: &FqPoly, mult: usize, out: &mut Vec<(FqPoly, usize)>) -> Result<()> {
    if f.deg() == 0 {
        return Ok(());
    }
    let p = f.field().p() as usize;
    let df = f.derivative();
    let mut c = f.gcd(&df);
    let mut w = f.exact_div(&c)?;
    let mut i = 1;
    while !w.is_one() {
        let y = w.gcd(&c);
        let fac = w.exact_div(&y)?;
        if !fac.is_one() {
            push_merge(out, fac, i * mult);
        }
        w = y;
        c = c.exact_div(&w)?;
        i += 1;
    }
    if !c.is_one() {
        let root = c.pth_root()?;
        sqf_rec(&root, mult * p, out)?;
    }
    Ok(())
}

fn push_merge(out: &mut Vec<(FqPoly, usize)>, g: FqPoly, m: usize) {
    if let Some(entry) = out.iter_mut().find(|(_, k)| *k == m) {
        entry.0 = &entry.0 * &g;
    } else {
        out.push((g, m));
    }
}

/// The radical (product of distinct monic irreducible factors) of a monic polynomial.
pub fn radical(f: &FqPoly) -> Result<FqPoly> {
    let mut r = FqPoly::one(f.field());
    for (g, _) in squarefree_decomposition(f)? {
        r = &r * &g;
    }
    Ok(r)
}

/// Distinct-degree factorization of a square-free monic polynomial.
pub fn distinct_degree(f: &FqPoly) -> Vec<(FqPoly, usize)> {
    let field = f.field();
    let x = FqPoly::var(field);
    let q = field.q() as u64;
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut out = Vec::new();
    let mut d = 0;
    while rest.deg() >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(q, &rest);
        let g = (&h - &x).gcd(&rest);
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let k = rest.deg();
        out.push((rest, k));
    }
    out
}

/// Split a square-free product of irreducibles of common degree d (Cantor–Zassenhaus).
pub fn equal_degree(f: &FqPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<FqPoly> {
    let n = f.deg();
    if n == d {
        return vec![f.clone()];
    }
    let field = f.field();
    let q = field.q() as u64;
    loop {
        let a = random_poly(f, rng);
        if a.deg() == 0 && a.coeff(0).is_zero() {
            continue;
        }
        let g0 = a.gcd(f);
        let candidate = if !g0.is_one() {
            g0
        } else if field.p() == 2 {
            // Absolute trace a + a^2 + … + a^(2^(e·d − 1)).
            let steps = field.e() as usize * d;
            let mut t = a.clone();
            let mut acc = a.clone();
            for _ in 1..steps {
                t = t.mul_mod(&t, f);
                acc = &acc + &t;
            }
            acc.gcd(f)
        } else {
            // a^((q^d − 1)/2) = N(a)^((q − 1)/2) with N(a) = ∏_{j<d} a^(q^j).
            let mut norm = FqPoly::one(field);
            let mut t = a.clone();
            for _ in 0..d {
                norm = norm.mul_mod(&t, f);
                t = t.pow_mod(q, f);
            }
            let b = norm.pow_mod((q - 1) / 2, f);
            (&b - &FqPoly::one(field)).gcd(f)
        };
        if candidate.deg() > 0 && candidate.deg() < n {
            let other = f.exact_div(&candidate).expect("factor");
            let mut out = equal_degree(&candidate, d, rng);
            out.extend(equal_degree(&other, d, rng));
            return out;
        }
    }
}

fn random_poly(f: &FqPoly, rng: &mut ChaCha8Rng) -> FqPoly {
    let field = f.field();
    let coeffs = (0..f.deg()).map(|_| Fq(rng.gen_range(0..field.q()))).collect();
    FqPoly::new(field, coeffs)
}

/// Complete factorization into monic irreducibles with multiplicities,
/// sorted by degree then lexicographically from the top coefficient.
pub fn factor(f: &FqPoly) -> Result<Vec<(FqPoly, usize)>> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_text()));
    }
    if f.deg() == 0 {
        return Err(Error::InvalidArgument("factor of a constant".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SPLIT_SEED);
    let mut out: Vec<(FqPoly, usize)> = Vec::new();
    for (g, m) in squarefree_decomposition(f)? {
        for (h, d) in distinct_degree(&g) {
            for irr in equal_degree(&h, d, &mut rng) {
                out.push((irr, m));
            }
        }
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::field::FqField;
    use crate::ffpoly::irreducible::is_irreducible;
    use std::sync::Arc;

    fn poly(f: &Arc<FqField>, c: &[u32]) -> FqPoly {
        FqPoly::from_codes(f, c).unwrap()
    }

    fn reconstruct(f: &Arc<FqField>, fac: &[(FqPoly, usize)]) -> FqPoly {
        fac.iter().fold(FqPoly::one(f), |acc, (g, m)| &acc * &g.pow(*m as u64))
    }

    #[test]
    fn spec_examples() {
        let f2 = FqField::prime(2).unwrap();
        let f3 = FqField::prime(3).unwrap();
        assert_eq!(factor(&poly(&f2, &[1, 0, 1])).unwrap(), vec![(poly(&f2, &[1, 1]), 2)]);
        let g = poly(&f3, &[0, 1, 0, 1]);
        let fac = factor(&g).unwrap();
        assert_eq!(fac, vec![(poly(&f3, &[0, 1]), 1), (poly(&f3, &[1, 0, 1]), 1)]);
        assert_eq!(reconstruct(&f3, &fac), g);
        let irr = poly(&f2, &[1, 1, 0, 1]);
        assert_eq!(factor(&irr).unwrap(), vec![(irr.clone(), 1)]);
    }

    #[test]
    fn wild_multiplicities() {
        let f = FqField::prime(3).unwrap();
        let a = poly(&f, &[1, 1]);
        let b = poly(&f, &[1, 0, 1]);
        let g = &a.pow(9) * &(&b.pow(4) * &poly(&f, &[0, 1]).pow(3));
        let fac = factor(&g).unwrap();
        assert_eq!(fac, vec![(poly(&f, &[0, 1]), 3), (a.clone(), 9), (b.clone(), 4)]);
        assert_eq!(radical(&g).unwrap(), &(&a * &b) * &poly(&f, &[0, 1]));
    }

    #[test]
    fn factors_are_irreducible_over_extension_fields() {
        for (p, e) in [(2, 2), (3, 2), (2, 3)] {
            let f = FqField::new(p, e).unwrap();
            let g = poly(&f, &[1, 2 % f.q(), 0, 3 % f.q(), 1, 1, 0, 1]).monic();
            let fac = factor(&g).unwrap();
            assert_eq!(reconstruct(&f, &fac), g);
            for (h, _) in &fac {
                assert!(is_irreducible(h).unwrap());
            }
        }
    }
}
