//! The Carlitz module over A = F_q[θ]: the twisted polynomial ring A{τ},
//! the action x ↦ ρ_x, torsion polynomials and the real-subfield generator.

use std::sync::Arc;

use serde::Serialize;

use crate::bipoly::{BiPoly, BiPolyJson};
use crate::error::{Error, Result};
use crate::ffpoly::{factor, Fq, FqField, FqPoly, ResidueRing};

/// Σ a_i τ^i with coefficients in A and τ·a = a^q·τ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedPoly {
    field: Arc<FqField>,
    coeffs: Vec<FqPoly>,
}

impl TwistedPoly {
    pub fn new(field: &Arc<FqField>, coeffs: Vec<FqPoly>) -> TwistedPoly {
        let mut t = TwistedPoly { field: field.clone(), coeffs };
        while t.coeffs.last().is_some_and(|c| c.is_zero()) {
            t.coeffs.pop();
        }
        t
    }

    pub fn zero(field: &Arc<FqField>) -> TwistedPoly {
        TwistedPoly::new(field, vec![])
    }

    pub fn one(field: &Arc<FqField>) -> TwistedPoly {
        TwistedPoly::constant(FqPoly::one(field))
    }

    pub fn constant(a: FqPoly) -> TwistedPoly {
        let field = a.field().clone();
        TwistedPoly::new(&field, vec![a])
    }

    pub fn tau(field: &Arc<FqField>) -> TwistedPoly {
        TwistedPoly::new(field, vec![FqPoly::zero(field), FqPoly::one(field)])
    }

    pub fn coeffs(&self) -> &[FqPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FqPoly {
        self.coeffs.get(i).cloned().unwrap_or_else(|| FqPoly::zero(&self.field))
    }

    /// τ-degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The constant-term map D.
    pub fn constant_term(&self) -> FqPoly {
        self.coeff(0)
    }

    pub fn add(&self, other: &TwistedPoly) -> TwistedPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        TwistedPoly::new(&self.field, (0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &TwistedPoly) -> TwistedPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        TwistedPoly::new(&self.field, (0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    /// Composition (a τ^i)(b τ^j) = a b^(q^i) τ^(i+j).
    pub fn mul(&self, other: &TwistedPoly) -> TwistedPoly {
        if self.is_zero() || other.is_zero() {
            return TwistedPoly::zero(&self.field);
        }
        let q = self.field.q() as usize;
        let mut out = vec![FqPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let qi = q.pow(i as u32);
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * &frobenius_twist(b, qi));
                }
            }
        }
        TwistedPoly::new(&self.field, out)
    }

    /// Σ a_i X^(q^i).
    pub fn to_additive(&self) -> BiPoly {
        let q = self.field.q() as usize;
        let mut coeffs = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate() {
            let e = q.pow(i as u32);
            coeffs.resize(e + 1, FqPoly::zero(&self.field));
            coeffs[e] = a.clone();
        }
        BiPoly::new(&self.field, coeffs)
    }
}

/// a ↦ a^k for k a power of q; F_q-coefficients are fixed so this is θ ↦ θ^k.
fn frobenius_twist(a: &FqPoly, k: usize) -> FqPoly {
    a.inflate(k)
}

/// x together with ρ_x.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarlitzValue {
    pub x: FqPoly,
    pub rho_x: TwistedPoly,
}

impl CarlitzValue {
    pub fn new(x: &FqPoly) -> CarlitzValue {
        CarlitzValue { x: x.clone(), rho_x: rho(x) }
    }
}

/// ρ_x, the F_q-algebra map determined by ρ_θ = θ + τ (Horner in ρ_θ).
pub fn rho(x: &FqPoly) -> TwistedPoly {
    let field = x.field();
    let rho_theta = TwistedPoly::new(field, vec![FqPoly::var(field), FqPoly::one(field)]);
    let mut acc = TwistedPoly::zero(field);
    for &c in x.coeffs().iter().rev() {
        acc = rho_theta.mul(&acc).add(&TwistedPoly::constant(FqPoly::constant(field, c)));
    }
    acc
}

/// ρ_x as the additive polynomial Σ a_i X^(q^i).
pub fn rho_as_additive_poly(x: &FqPoly) -> BiPoly {
    rho(x).to_additive()
}

/// The action x ∗ z on an F_q-algebra F_{q^j} where θ acts as θ₀.
pub fn act(x: &FqPoly, ext: &FqField, embedding: &[Fq], theta0: Fq, z: Fq) -> Fq {
    rho_as_additive_poly(x).eval(ext, embedding, theta0, z)
}

/// Primitive 𝔪-torsion polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicPoly {
    pub m: FqPoly,
    pub phi: BiPoly,
}

#[derive(Serialize)]
struct CyclotomicJson {
    m: String,
    phi: BiPolyJson,
}

impl Serialize for CyclotomicPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CyclotomicJson { m: self.m.to_text(), phi: self.phi.to_json() }.serialize(s)
    }
}

fn check_modulus(m: &FqPoly) -> Result<()> {
    if !m.is_monic() || m.deg() == 0 {
        return Err(Error::InvalidArgument(format!("modulus {m} must be monic of degree ≥ 1")));
    }
    Ok(())
}

/// Φ(𝔪) = |(A/𝔪)^×|.
pub fn euler_phi(m: &FqPoly) -> Result<u64> {
    ResidueRing::new(m)?.unit_count()
}

/// φ_𝔪 = ∏_{d | rad 𝔪} ρ_{𝔪/d}^{μ(d)}, computed by exact division.
pub fn cyclotomic_poly(m: &FqPoly) -> Result<CyclotomicPoly> {
    check_modulus(m)?;
    let field = m.field();
    let primes: Vec<FqPoly> = factor(m)?.into_iter().map(|(p, _)| p).collect();
    let one = BiPoly::monomial(FqPoly::one(field), 0);
    let (mut num, mut den) = (one.clone(), one);
    for mask in 0u32..(1 << primes.len()) {
        let mut d = m.clone();
        for (i, p) in primes.iter().enumerate() {
            if mask & (1 << i) != 0 {
                d = d.exact_div(p)?;
            }
        }
        let r = rho_as_additive_poly(&d);
        if mask.count_ones() % 2 == 0 {
            num = num.mul(&r);
        } else {
            den = den.mul(&r);
        }
    }
    let phi = num.exact_div(&den)?;
    let expected = euler_phi(m)?;
    if phi.degree() != Some(expected as usize) {
        return Err(Error::Consistency(format!("cyclotomic degree {:?} ≠ Φ = {expected}", phi.degree())));
    }
    Ok(CyclotomicPoly { m: m.clone(), phi })
}

/// Minimal polynomial over k of λ^(q−1) for λ a primitive 𝔪-torsion point.
///
/// φ_𝔪 only involves powers Y^(j(q−1)), so with F(X) = φ_𝔪 at Y^(q−1) = X we get
/// Res_Y(φ_𝔪(Y), X − Y^(q−1)) = F(X)^(q−1); F is irreducible because φ_𝔪 is, and has
/// the expected degree Φ(𝔪)/(q−1).
pub fn real_generator_minpoly(m: &FqPoly) -> Result<BiPoly> {
    let cyc = cyclotomic_poly(m)?;
    let k = m.field().q() as usize - 1;
    if k == 1 {
        return Ok(cyc.phi);
    }
    let f = cyc
        .phi
        .deflate(k)
        .ok_or_else(|| Error::Ambiguous(format!("φ_𝔪 for 𝔪 = {m} is not a polynomial in Y^{k}; no canonical factor of the resultant")))?;
    let expected = cyc.phi.degree().unwrap_or(0) / k;
    if f.degree() != Some(expected) {
        return Err(Error::Ambiguous(format!("degree {:?} ≠ {expected}", f.degree())));
    }
    Ok(f)
}

/// ρ[𝔪] modelled as A/𝔪 (free of rank one, generated by 1).
#[derive(Clone, Debug)]
pub struct TorsionModel {
    ring: ResidueRing,
}

impl TorsionModel {
    pub fn new(m: &FqPoly) -> Result<TorsionModel> {
        check_modulus(m)?;
        Ok(TorsionModel { ring: ResidueRing::new(m)? })
    }

    pub fn modulus(&self) -> &FqPoly {
        self.ring.modulus()
    }

    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    /// x ∗ a.
    pub fn act(&self, x: &FqPoly, a: &FqPoly) -> FqPoly {
        self.ring.mul(x, a)
    }

    /// σ_x(a) for a unit x mod 𝔪; monic representatives need no sign correction.
    pub fn galois_action(&self, x: &FqPoly, a: &FqPoly) -> Result<FqPoly> {
        if !self.ring.is_unit(x) {
            return Err(Error::InvalidArgument(format!("{x} is not a unit mod {}", self.modulus())));
        }
        Ok(self.act(x, a))
    }

    /// Monic generator of the annihilator of a.
    pub fn annihilator(&self, a: &FqPoly) -> FqPoly {
        let m = self.modulus();
        m.exact_div(&a.gcd(m)).expect("gcd divides the modulus").monic()
    }

    /// a generates the module (is a primitive torsion point).
    pub fn is_generator(&self, a: &FqPoly) -> bool {
        self.ring.is_unit(a)
    }

    pub fn generator_count(&self) -> Result<u64> {
        self.ring.unit_count()
    }
}
