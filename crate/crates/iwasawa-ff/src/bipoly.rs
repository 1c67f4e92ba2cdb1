//! Polynomials in an auxiliary variable X with coefficients in A = F_q[θ].

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{Fq, FqField, FqPoly};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    field: Arc<FqField>,
    /// coeffs[j] is the coefficient of X^j.
    coeffs: Vec<FqPoly>,
}

/// JSON form: the coefficient grid, one row per power of X, each row listing θ-coefficients.
#[derive(Serialize)]
pub struct BiPolyJson {
    pub q: String,
    pub grid: Vec<Vec<u32>>,
}

impl BiPoly {
    pub fn new(field: &Arc<FqField>, coeffs: Vec<FqPoly>) -> BiPoly {
        let mut b = BiPoly { field: field.clone(), coeffs };
        while b.coeffs.last().is_some_and(|c| c.is_zero()) {
            b.coeffs.pop();
        }
        b
    }

    pub fn zero(field: &Arc<FqField>) -> BiPoly {
        BiPoly { field: field.clone(), coeffs: vec![] }
    }

    pub fn monomial(coeff: FqPoly, degree: usize) -> BiPoly {
        let field = coeff.field().clone();
        let mut coeffs = vec![FqPoly::zero(&field); degree + 1];
        coeffs[degree] = coeff;
        BiPoly::new(&field, coeffs)
    }

    /// X itself.
    pub fn x(field: &Arc<FqField>) -> BiPoly {
        BiPoly::monomial(FqPoly::one(field), 1)
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> FqPoly {
        self.coeffs.get(j).cloned().unwrap_or_else(|| FqPoly::zero(&self.field))
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    /// Largest θ-degree among the coefficients.
    pub fn theta_degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.deg()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        BiPoly::new(&self.field, (0..n).map(|j| &self.coeff(j) + &other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        BiPoly::new(&self.field, (0..n).map(|j| &self.coeff(j) - &other.coeff(j)).collect())
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero(&self.field);
        }
        let mut out = vec![FqPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        BiPoly::new(&self.field, out)
    }

    pub fn scale(&self, c: &FqPoly) -> BiPoly {
        BiPoly::new(&self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Division by a divisor monic in X; exact over A.
    pub fn div_rem(&self, d: &BiPoly) -> Result<(BiPoly, BiPoly)> {
        if !d.is_monic() {
            return Err(Error::NotMonic("divisor must be monic in X".into()));
        }
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return Ok((BiPoly::zero(&self.field), self.clone()));
        }
        let mut r = self.coeffs.clone();
        let mut quot = vec![FqPoly::zero(&self.field); r.len() - dd];
        for i in (0..quot.len()).rev() {
            let c = r[i + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                if !dj.is_zero() {
                    r[i + j] = &r[i + j] - &(&c * dj);
                }
            }
            quot[i] = c;
        }
        r.truncate(dd);
        Ok((BiPoly::new(&self.field, quot), BiPoly::new(&self.field, r)))
    }

    pub fn exact_div(&self, d: &BiPoly) -> Result<BiPoly> {
        let (q, r) = self.div_rem(d)?;
        if !r.is_zero() {
            return Err(Error::Consistency("nonzero remainder in exact division".into()));
        }
        Ok(q)
    }

    /// Substitute θ = θ₀ for θ₀ in an extension field, giving a polynomial in X there.
    pub fn specialize(&self, ext: &Arc<FqField>, embedding: &[Fq], theta0: Fq) -> FqPoly {
        FqPoly::new(ext, self.coeffs.iter().map(|c| c.eval_in(ext, embedding, theta0)).collect())
    }

    /// Evaluate at (θ₀, x₀) in an extension field.
    pub fn eval(&self, ext: &FqField, embedding: &[Fq], theta0: Fq, x0: Fq) -> Fq {
        self.coeffs.iter().rev().fold(Fq::ZERO, |acc, c| ext.add(ext.mul(acc, x0), c.eval_in(ext, embedding, theta0)))
    }

    /// Keep only X-exponents divisible by k and divide them by k; `None` if any other exponent occurs.
    pub fn deflate(&self, k: usize) -> Option<BiPoly> {
        let mut out = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            if j % k == 0 {
                out.push(c.clone());
            } else if !c.is_zero() {
                return None;
            }
        }
        Some(BiPoly::new(&self.field, out))
    }

    pub fn to_json(&self) -> BiPolyJson {
        BiPolyJson { q: self.field.tag(), grid: self.coeffs.iter().map(|c| c.codes()).collect() }
    }
}
