use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};

use super::field::{Fq, FqField};

/// A polynomial over F_q in dense form with trailing zeros trimmed.
#[derive(Clone)]
pub struct FqPoly {
    field: Arc<FqField>,
    coeffs: Vec<Fq>,
}

impl fmt::Debug for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for FqPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.0) {
                (0, _) => write!(f, "{}", c.0)?,
                (1, 1) => write!(f, "θ")?,
                (1, _) => write!(f, "{}θ", c.0)?,
                (_, 1) => write!(f, "θ^{i}")?,
                _ => write!(f, "{}θ^{i}", c.0)?,
            }
        }
        Ok(())
    }
}

impl PartialEq for FqPoly {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && *self.field == *other.field
    }
}
impl Eq for FqPoly {}

impl Hash for FqPoly {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FqPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients compared from the top down.
impl Ord for FqPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coeffs.len().cmp(&other.coeffs.len()).then_with(|| self.coeffs.iter().rev().cmp(other.coeffs.iter().rev()))
    }
}

impl FqPoly {
    pub fn new(field: &Arc<FqField>, coeffs: Vec<Fq>) -> FqPoly {
        let mut p = FqPoly { field: field.clone(), coeffs };
        p.trim();
        p
    }

    /// From integer codes of the coefficients (ascending).
    pub fn from_codes(field: &Arc<FqField>, codes: &[u32]) -> Result<FqPoly> {
        let coeffs = codes.iter().map(|&c| field.elem(c)).collect::<Result<Vec<_>>>()?;
        Ok(FqPoly::new(field, coeffs))
    }

    pub fn zero(field: &Arc<FqField>) -> FqPoly {
        FqPoly { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Arc<FqField>) -> FqPoly {
        FqPoly::constant(field, Fq::ONE)
    }

    pub fn constant(field: &Arc<FqField>, c: Fq) -> FqPoly {
        FqPoly::new(field, vec![c])
    }

    /// The variable θ.
    pub fn var(field: &Arc<FqField>) -> FqPoly {
        FqPoly::monomial(field, Fq::ONE, 1)
    }

    pub fn monomial(field: &Arc<FqField>, c: Fq, degree: usize) -> FqPoly {
        let mut coeffs = vec![Fq::ZERO; degree + 1];
        coeffs[degree] = c;
        FqPoly::new(field, coeffs)
    }

    /// θ + c.
    pub fn linear(field: &Arc<FqField>, c: Fq) -> FqPoly {
        FqPoly::new(field, vec![c, Fq::ONE])
    }

    fn trim(&mut self) {
        while let Some(c) = self.coeffs.last() {
            if c.is_zero() {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.coeffs
    }

    pub fn codes(&self) -> Vec<u32> {
        self.coeffs.iter().map(|c| c.0).collect()
    }

    /// Coefficient of θ^i (zero past the degree).
    pub fn coeff(&self, i: usize) -> Fq {
        self.coeffs.get(i).copied().unwrap_or(Fq::ZERO)
    }

    /// `None` encodes deg(0) = −∞.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree with deg(0) reported as 0; for sizes and loop bounds.
    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == Fq::ONE
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Fq {
        self.coeffs.last().copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_monic(&self) -> bool {
        self.leading() == Fq::ONE
    }

    pub fn same_field(&self, other: &FqPoly) -> Result<()> {
        if Arc::ptr_eq(&self.field, &other.field) || *self.field == *other.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch(format!("{:?}", self.field), format!("{:?}", other.field)))
        }
    }

    fn check(&self, other: &FqPoly) {
        if let Err(e) = self.same_field(other) {
            panic!("{e}");
        }
    }

    pub fn try_add(&self, other: &FqPoly) -> Result<FqPoly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.add(self.coeff(i), other.coeff(i))).collect();
        Ok(FqPoly::new(f, coeffs))
    }

    pub fn try_sub(&self, other: &FqPoly) -> Result<FqPoly> {
        self.same_field(other)?;
        let f = &self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| f.sub(self.coeff(i), other.coeff(i))).collect();
        Ok(FqPoly::new(f, coeffs))
    }

    pub fn try_mul(&self, other: &FqPoly) -> Result<FqPoly> {
        self.same_field(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(FqPoly::zero(&self.field));
        }
        let f = &self.field;
        let mut out = vec![Fq::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = f.add(out[i + j], f.mul(a, b));
                }
            }
        }
        Ok(FqPoly::new(f, out))
    }

    pub fn scale(&self, c: Fq) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiply by θ^k.
    pub fn shift(&self, k: usize) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Fq::ZERO; k];
        coeffs.extend_from_slice(&self.coeffs);
        FqPoly { field: self.field.clone(), coeffs }
    }

    /// Scale to a monic polynomial; zero stays zero.
    pub fn monic(&self) -> FqPoly {
        match self.field.inv(self.leading()) {
            Some(inv) => self.scale(inv),
            None => self.clone(),
        }
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, d: &FqPoly) -> Result<(FqPoly, FqPoly)> {
        self.same_field(d)?;
        let f = &self.field;
        let dl = f.inv(d.leading()).ok_or_else(|| Error::InvalidArgument("division by zero polynomial".into()))?;
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() < d.coeffs.len() {
            return Ok((FqPoly::zero(f), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut quot = vec![Fq::ZERO; r.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = f.mul(r[i + dd], dl);
            if c.is_zero() {
                continue;
            }
            quot[i] = c;
            for (j, &dj) in d.coeffs.iter().enumerate() {
                r[i + j] = f.sub(r[i + j], f.mul(c, dj));
            }
        }
        r.truncate(dd);
        Ok((FqPoly::new(f, quot), FqPoly::new(f, r)))
    }

    pub fn rem(&self, d: &FqPoly) -> FqPoly {
        self.div_rem(d).expect("nonzero divisor").1
    }

    /// Exact quotient; errors if the remainder is nonzero.
    pub fn exact_div(&self, d: &FqPoly) -> Result<FqPoly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Consistency(format!("{self} is not divisible by {d}")));
        }
        Ok(q)
    }

    pub fn divides(&self, other: &FqPoly) -> bool {
        other.div_rem(self).map(|(_, r)| r.is_zero()).unwrap_or(false)
    }

    /// Monic gcd (zero if both are zero).
    pub fn gcd(&self, other: &FqPoly) -> FqPoly {
        self.check(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// (g, s, t) with s·self + t·other = g monic.
    pub fn ext_gcd(&self, other: &FqPoly) -> (FqPoly, FqPoly, FqPoly) {
        self.check(other);
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (FqPoly::one(f), FqPoly::zero(f));
        let (mut t0, mut t1) = (FqPoly::zero(f), FqPoly::one(f));
        while !r1.is_zero() {
            let (qt, r) = r0.div_rem(&r1).expect("nonzero");
            r0 = std::mem::replace(&mut r1, r);
            let s = &s0 - &(&qt * &s1);
            s0 = std::mem::replace(&mut s1, s);
            let t = &t0 - &(&qt * &t1);
            t0 = std::mem::replace(&mut t1, t);
        }
        match f.inv(r0.leading()) {
            Some(inv) => (r0.scale(inv), s0.scale(inv), t0.scale(inv)),
            None => (r0, s0, t0),
        }
    }

    /// Inverse modulo m, if it exists.
    pub fn inverse_mod(&self, m: &FqPoly) -> Option<FqPoly> {
        let (g, s, _) = self.rem(m).ext_gcd(m);
        if g.is_one() {
            Some(s.rem(m))
        } else {
            None
        }
    }

    pub fn mul_mod(&self, other: &FqPoly, m: &FqPoly) -> FqPoly {
        (self * other).rem(m)
    }

    pub fn pow(&self, mut n: u64) -> FqPoly {
        let mut result = FqPoly::one(&self.field);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    pub fn pow_mod(&self, mut n: u64, m: &FqPoly) -> FqPoly {
        let mut result = FqPoly::one(&self.field).rem(m);
        let mut base = self.rem(m);
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul_mod(&base, m);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_mod(&base, m);
            }
        }
        result
    }

    /// self^(q^k) mod m by iterated q-th powering.
    pub fn frobenius_pow_mod(&self, k: u32, m: &FqPoly) -> FqPoly {
        let q = self.field.q() as u64;
        let mut x = self.rem(m);
        for _ in 0..k {
            x = x.pow_mod(q, m);
        }
        x
    }

    pub fn derivative(&self) -> FqPoly {
        let f = &self.field;
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| f.mul(f.from_int(i as i64), c)).collect();
        FqPoly::new(f, coeffs)
    }

    pub fn eval(&self, x: Fq) -> Fq {
        let f = &self.field;
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
    }

    /// Evaluate at a point of an extension field given the embedding table of the coefficients.
    pub fn eval_in(&self, ext: &FqField, embedding: &[Fq], x: Fq) -> Fq {
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, &c| ext.add(ext.mul(acc, x), embedding[c.0 as usize]))
    }

    /// Substitute θ ↦ g.
    pub fn compose(&self, g: &FqPoly) -> FqPoly {
        self.check(g);
        let mut acc = FqPoly::zero(&self.field);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * g) + &FqPoly::constant(&self.field, c);
        }
        acc
    }

    /// Substitute θ ↦ θ^k.
    pub fn inflate(&self, k: usize) -> FqPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![Fq::ZERO; (self.coeffs.len() - 1) * k + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * k] = c;
        }
        FqPoly::new(&self.field, coeffs)
    }

    /// Apply the coefficient Frobenius c ↦ c^(p^j) … used for p-th roots.
    pub fn map_coeffs(&self, g: impl Fn(Fq) -> Fq) -> FqPoly {
        FqPoly::new(&self.field, self.coeffs.iter().map(|&c| g(c)).collect())
    }

    /// For f with f' = 0, returns g with g^p = f.
    pub fn pth_root(&self) -> Result<FqPoly> {
        let p = self.field.p() as usize;
        let f = &self.field;
        let mut coeffs = Vec::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            if i % p != 0 {
                if !c.is_zero() {
                    return Err(Error::InvalidArgument(format!("{self} is not a p-th power")));
                }
                continue;
            }
            coeffs.push(f.pth_root(c));
        }
        Ok(FqPoly::new(f, coeffs))
    }

    /// Canonical text form `[c0,c1,...]@q=p^e`.
    pub fn to_text(&self) -> String {
        let body: Vec<String> = self.coeffs.iter().map(|c| c.0.to_string()).collect();
        format!("[{}]@q={}", body.join(","), self.field.tag())
    }
}

impl<'a> Add<&'a FqPoly> for &'a FqPoly {
    type Output = FqPoly;
    fn add(self, rhs: &FqPoly) -> FqPoly {
        self.try_add(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Sub<&'a FqPoly> for &'a FqPoly {
    type Output = FqPoly;
    fn sub(self, rhs: &FqPoly) -> FqPoly {
        self.try_sub(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<'a> Mul<&'a FqPoly> for &'a FqPoly {
    type Output = FqPoly;
    fn mul(self, rhs: &FqPoly) -> FqPoly {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl Neg for &FqPoly {
    type Output = FqPoly;
    fn neg(self) -> FqPoly {
        let f = &self.field;
        FqPoly::new(f, self.coeffs.iter().map(|&c| f.neg(c)).collect())
    }
}

/// Product of two polynomials over the same field.
pub fn poly_mul(a: &FqPoly, b: &FqPoly) -> Result<FqPoly> {
    a.try_mul(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &Arc<FqField>, c: &[u32]) -> FqPoly {
        FqPoly::from_codes(f, c).unwrap()
    }

    #[test]
    fn spec_products() {
        let f2 = FqField::prime(2).unwrap();
        let f3 = FqField::prime(3).unwrap();
        let t1 = poly(&f2, &[1, 1]);
        assert_eq!(poly_mul(&t1, &t1).unwrap(), poly(&f2, &[1, 0, 1]));
        assert_eq!(poly_mul(&t1, &FqPoly::one(&f2)).unwrap(), t1);
        let a = poly(&f3, &[1, 0, 1]);
        let b = poly(&f3, &[0, 1]);
        assert_eq!(poly_mul(&a, &b).unwrap(), poly(&f3, &[0, 1, 0, 1]));
        assert!(poly_mul(&a, &t1).is_err());
    }

    #[test]
    fn division_and_gcd() {
        let f = FqField::prime(5).unwrap();
        let a = poly(&f, &[1, 2, 3, 4, 1]);
        let b = poly(&f, &[3, 0, 1]);
        let (qt, r) = a.div_rem(&b).unwrap();
        assert_eq!(&(&qt * &b) + &r, a);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(&(&s * &a) + &(&t * &b), g);
        assert!(g.divides(&a) && g.divides(&b));
    }

    #[test]
    fn ordering_is_degree_then_top_down() {
        let f = FqField::prime(3).unwrap();
        let mut v = vec![poly(&f, &[2, 1]), poly(&f, &[0, 1]), poly(&f, &[1]), poly(&f, &[1, 1])];
        v.sort();
        assert_eq!(v, vec![poly(&f, &[1]), poly(&f, &[0, 1]), poly(&f, &[1, 1]), poly(&f, &[2, 1])]);
    }

    #[test]
    fn pth_root_roundtrip() {
        let f = FqField::new(3, 2).unwrap();
        let g = poly(&f, &[4, 7, 1]);
        let h = g.pow(3);
        assert_eq!(h.derivative(), FqPoly::zero(&f));
        assert_eq!(h.pth_root().unwrap(), g);
    }
}
