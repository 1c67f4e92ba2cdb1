use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

use super::field::{Fq, FqField};
use super::poly::FqPoly;

/// Ben-Or test: f of degree n is irreducible iff gcd(f, θ^(q^i) − θ) = 1 for all i ≤ n/2.
pub fn is_irreducible(f: &FqPoly) -> Result<bool> {
    if !f.is_monic() {
        return Err(Error::NotMonic(f.to_text()));
    }
    let n = f.degree().unwrap_or(0);
    if n == 0 {
        return Err(Error::InvalidArgument("irreducibility of a constant".into()));
    }
    if n == 1 {
        return Ok(true);
    }
    let field = f.field();
    let x = FqPoly::var(field);
    let q = field.q() as u64;
    let mut h = x.rem(f);
    for _ in 0..n / 2 {
        h = h.pow_mod(q, f);
        let g = (&h - &x).gcd(f);
        if !g.is_one() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A finite place of k = F_q(θ): a monic irreducible polynomial.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinitePlace {
    gen: FqPoly,
}

impl FinitePlace {
    /// Validates monicity and irreducibility.
    pub fn new(gen: FqPoly) -> Result<FinitePlace> {
        if !is_irreducible(&gen)? {
            return Err(Error::InvalidArgument(format!("{gen} is not irreducible")));
        }
        Ok(FinitePlace { gen })
    }

    /// Skip the irreducibility check (caller guarantees it).
    pub(crate) fn new_unchecked(gen: FqPoly) -> FinitePlace {
        FinitePlace { gen }
    }

    pub fn gen(&self) -> &FqPoly {
        &self.gen
    }

    pub fn degree(&self) -> usize {
        self.gen.deg()
    }
}

impl fmt::Debug for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

impl fmt::Display for FinitePlace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.gen)
    }
}

/// A place of k: finite, or the infinite place v_∞ (degree 1).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Place {
    Finite(FinitePlace),
    Infinity,
}

impl Place {
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(v) => v.degree(),
            Place::Infinity => 1,
        }
    }

    pub fn finite(&self) -> Option<&FinitePlace> {
        match self {
            Place::Finite(v) => Some(v),
            Place::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// Canonical label: `inf` or the polynomial text form.
    pub fn label(&self) -> String {
        match self {
            Place::Finite(v) => v.gen().to_text(),
            Place::Infinity => "inf".into(),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(v) => write!(f, "{v}"),
            Place::Infinity => write!(f, "∞"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl Serialize for FinitePlace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.gen.to_text())
    }
}

/// Monic polynomial of degree d whose lower coefficients are the base-q digits of `index`
/// (c_{d−1} most significant), so increasing index is the canonical order.
pub fn monic_from_index(field: &Arc<FqField>, d: usize, index: u64) -> FqPoly {
    let q = field.q() as u64;
    let mut coeffs = Vec::with_capacity(d + 1);
    let mut x = index;
    for _ in 0..d {
        coeffs.push(Fq((x % q) as u32));
        x /= q;
    }
    coeffs.push(Fq::ONE);
    FqPoly::new(field, coeffs)
}

/// Number of monic polynomials of degree d, checked against overflow.
pub fn monic_count(field: &FqField, d: usize) -> Result<u64> {
    (field.q() as u64).checked_pow(d as u32).ok_or_else(|| Error::Budget(format!("q^{d} overflows")))
}

/// Every monic irreducible of degree exactly d, in canonical order.
pub fn irreducibles_of_degree(field: &Arc<FqField>, d: usize) -> Result<Vec<FinitePlace>> {
    if d == 0 {
        return Err(Error::InvalidArgument("degree must be at least 1".into()));
    }
    let count = monic_count(field, d)?;
    if count > 50_000_000 {
        return Err(Error::Budget(format!("{count} candidates of degree {d}")));
    }
    let out: Vec<FinitePlace> = (0..count)
        .into_par_iter()
        .filter_map(|idx| {
            let f = monic_from_index(field, d, idx);
            // Cheap root screen before the full test.
            if d > 1 && f.coeff(0).is_zero() {
                return None;
            }
            match is_irreducible(&f) {
                Ok(true) => Some(FinitePlace::new_unchecked(f)),
                _ => None,
            }
        })
        .collect();
    Ok(out)
}

/// Möbius count (1/d) Σ_{e | d} μ(d/e) q^e.
pub fn irreducible_count(q: u64, d: usize) -> u64 {
    let d = d as u64;
    let mut total: i128 = 0;
    for e in crate::numtheory::divisors(d) {
        total += crate::numtheory::moebius(d / e) as i128 * (q as i128).pow(e as u32);
    }
    (total / d as i128) as u64
}

/// All finite places of degree ≤ d, grouped by degree.
pub fn places_up_to(field: &Arc<FqField>, d: usize) -> Result<Vec<Vec<FinitePlace>>> {
    (1..=d).map(|k| irreducibles_of_degree(field, k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &Arc<FqField>, c: &[u32]) -> FqPoly {
        FqPoly::from_codes(f, c).unwrap()
    }

    #[test]
    fn spec_irreducibility_examples() {
        let f2 = FqField::prime(2).unwrap();
        let f3 = FqField::prime(3).unwrap();
        assert!(is_irreducible(&poly(&f3, &[1, 0, 1])).unwrap());
        assert!(!is_irreducible(&poly(&f2, &[1, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(&f2, &[1, 1, 0, 1])).unwrap());
        assert!(is_irreducible(&poly(&f3, &[1, 0, 2])).is_err());
    }

    #[test]
    fn spec_enumeration_examples() {
        let f2 = FqField::prime(2).unwrap();
        let f3 = FqField::prime(3).unwrap();
        let d2 = irreducibles_of_degree(&f2, 2).unwrap();
        assert_eq!(d2.len(), 1);
        assert_eq!(d2[0].gen(), &poly(&f2, &[1, 1, 1]));
        assert_eq!(irreducibles_of_degree(&f2, 3).unwrap().len(), 2);
        let lin: Vec<FqPoly> = irreducibles_of_degree(&f3, 1).unwrap().into_iter().map(|v| v.gen().clone()).collect();
        assert_eq!(lin, vec![poly(&f3, &[0, 1]), poly(&f3, &[1, 1]), poly(&f3, &[2, 1])]);
    }

    /// Oracle: irreducible iff no monic factor of degree ≤ n/2 divides it (trial division).
    fn trial_division_irreducible(f: &FqPoly) -> bool {
        let n = f.deg();
        let field = f.field();
        for d in 1..=n / 2 {
            for idx in 0..(field.q() as u64).pow(d as u32) {
                if monic_from_index(field, d, idx).divides(f) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn ben_or_matches_trial_division() {
        for (p, e, dmax) in [(2, 1, 8), (3, 1, 5), (2, 2, 4), (5, 1, 4)] {
            let f = FqField::new(p, e).unwrap();
            for d in 1..=dmax {
                let irr = irreducibles_of_degree(&f, d).unwrap();
                let brute: usize =
                    (0..(f.q() as u64).pow(d as u32)).filter(|&i| trial_division_irreducible(&monic_from_index(&f, d, i))).count();
                assert_eq!(irr.len(), brute);
                assert_eq!(irr.len() as u64, irreducible_count(f.q() as u64, d));
            }
        }
    }
}
