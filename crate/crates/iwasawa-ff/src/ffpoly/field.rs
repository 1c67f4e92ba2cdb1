use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{is_prime, prime_factors};

/// Default upper bound on q for user-facing fields.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 16;
/// Hard upper bound on the size of any field table (extension fields used for point counting).
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

/// An element of F_q, encoded as the integer `Σ c_i p^i` of its coordinates
/// in the power basis of the defining modulus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The finite field F_q = F_p[t]/(modulus), with log/antilog tables.
///
/// The modulus is the smallest primitive monic polynomial of degree `e`
/// (ordered by its lower coefficients read from the top), so `t` generates F_q^×.
pub struct FqField {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    pow_p: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    pth_root_exp: u64,
}

impl fmt::Debug for FqField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{}[t]/({:?})", self.p, self.e, self.modulus)
    }
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}
impl Eq for FqField {}

impl FqField {
    /// F_{p^e} with q bounded by [`DEFAULT_FIELD_BOUND`].
    pub fn new(p: u32, e: u32) -> Result<Arc<FqField>> {
        Self::with_bound(p, e, DEFAULT_FIELD_BOUND)
    }

    /// Prime field F_p.
    pub fn prime(p: u32) -> Result<Arc<FqField>> {
        Self::new(p, 1)
    }

    /// F_{p^e} with an explicit bound on q (never above [`MAX_FIELD_SIZE`]).
    pub fn with_bound(p: u32, e: u32, bound: u64) -> Result<Arc<FqField>> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        let limit = bound.min(MAX_FIELD_SIZE);
        if q > limit {
            return Err(Error::InvalidField(format!("q = {p}^{e} exceeds the bound {limit}")));
        }
        let q = q as u32;
        let pow_p: Vec<u32> = (0..=e).map(|i| p.pow(i)).collect();
        let modulus = find_primitive_modulus(p, e)?;
        let order = q - 1;
        // exp[i] = t^i, built by repeated multiplication by t (shift and reduce).
        let mut exp = Vec::with_capacity(2 * order as usize);
        let mut log = vec![0u32; q as usize];
        let mut cur = vec![0u32; e as usize];
        cur[0] = 1;
        for i in 0..order {
            let code = encode(&cur, p);
            exp.push(code);
            log[code as usize] = i;
            cur = mul_by_t(&cur, &modulus, p);
        }
        let again = exp.clone();
        exp.extend(again);
        // p-th root: a^(p^-1 mod q-1) on the multiplicative group.
        let pth_root_exp = if order == 1 {
            1
        } else {
            crate::numtheory::mod_inverse(p as u64 % order as u64, order as u64).expect("p is invertible modulo q - 1")
        };
        Ok(Arc::new(FqField { p, e, q, modulus, pow_p, exp, log, pth_root_exp }))
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn e(&self) -> u32 {
        self.e
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    /// Defining polynomial over F_p, coefficients ascending, monic of degree e.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The text tag `p^e` used in serialized polynomials.
    pub fn tag(&self) -> String {
        format!("{}^{}", self.p, self.e)
    }

    pub fn zero(&self) -> Fq {
        Fq::ZERO
    }
    pub fn one(&self) -> Fq {
        Fq::ONE
    }

    /// The distinguished generator t of F_q^×.
    pub fn primitive_element(&self) -> Fq {
        Fq(self.exp[1])
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element from its integer code; errors if out of range.
    pub fn elem(&self, code: u32) -> Result<Fq> {
        if code < self.q {
            Ok(Fq(code))
        } else {
            Err(Error::InvalidArgument(format!("{code} is not an element of F_{}", self.q)))
        }
    }

    /// Coordinates over F_p (length e).
    pub fn coeffs(&self, a: Fq) -> Vec<u32> {
        let mut v = Vec::with_capacity(self.e as usize);
        let mut x = a.0;
        for _ in 0..self.e {
            v.push(x % self.p);
            x /= self.p;
        }
        v
    }

    pub fn from_coeffs(&self, c: &[u32]) -> Fq {
        let mut code = 0u32;
        for (i, &ci) in c.iter().enumerate().take(self.e as usize) {
            code += (ci % self.p) * self.pow_p[i];
        }
        Fq(code)
    }

    /// All elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        if self.e == 1 {
            let s = a.0 + b.0;
            return Fq(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y, mut out) = (a.0, b.0, 0u32);
        for i in 0..self.e as usize {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * self.pow_p[i];
            x /= self.p;
            y /= self.p;
        }
        Fq(out)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 || a.0 == 0 {
            return a;
        }
        if self.e == 1 {
            return Fq(self.p - a.0);
        }
        let (mut x, mut out) = (a.0, 0u32);
        for i in 0..self.e as usize {
            let d = (self.p - x % self.p) % self.p;
            out += d * self.pow_p[i];
            x /= self.p;
        }
        Fq(out)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        let s = self.log[a.0 as usize] + self.log[b.0 as usize];
        Fq(self.exp[s as usize])
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let order = self.q - 1;
        let l = self.log[a.0 as usize];
        Some(Fq(self.exp[((order - l) % order) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, n: u64) -> Fq {
        if n == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        let order = (self.q - 1) as u64;
        let l = (self.log[a.0 as usize] as u64 * (n % order)) % order;
        Fq(self.exp[l as usize])
    }

    /// Discrete logarithm to the base [`primitive_element`](Self::primitive_element).
    pub fn log(&self, a: Fq) -> Option<u32> {
        if a.0 == 0 {
            None
        } else {
            Some(self.log[a.0 as usize])
        }
    }

    /// t^i for the primitive element t.
    pub fn exp(&self, i: u64) -> Fq {
        Fq(self.exp[(i % (self.q as u64 - 1)) as usize])
    }

    /// Frobenius a ↦ a^p.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }

    /// The unique p-th root.
    pub fn pth_root(&self, a: Fq) -> Fq {
        self.pow(a, self.pth_root_exp)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fq) -> Option<u64> {
        let l = self.log(a)? as u64;
        let n = self.q as u64 - 1;
        Some(n / crate::numtheory::gcd(n, l))
    }

    /// The extension F_{q^i} together with the embedding table F_q → F_{q^i}
    /// (indexed by element code).
    pub fn extension(&self, degree: u32, bound: u64) -> Result<(Arc<FqField>, Vec<Fq>)> {
        let ext = FqField::with_bound(self.p, self.e * degree, bound)?;
        let big_order = ext.q as u64 - 1;
        let small_order = self.q as u64 - 1;
        // Roots of our modulus lie in the subfield {0} ∪ <t^((Q-1)/(q-1))>.
        let step = big_order / small_order;
        let mut root = None;
        for j in 0..small_order.max(1) {
            let cand = ext.exp(j * step);
            let mut acc = Fq::ZERO;
            for &c in self.modulus.iter().rev() {
                acc = ext.add(ext.mul(acc, cand), ext.from_int(c as i64));
            }
            if acc.is_zero() {
                root = Some(cand);
                break;
            }
        }
        let root = if self.e == 1 { Fq::ZERO } else { root.ok_or_else(|| Error::Consistency("no subfield embedding".into()))? };
        let mut table = Vec::with_capacity(self.q as usize);
        for a in self.elements() {
            let c = self.coeffs(a);
            let mut acc = Fq::ZERO;
            for &ci in c.iter().rev() {
                acc = ext.add(ext.mul(acc, root), ext.from_int(ci as i64));
            }
            table.push(acc);
        }
        Ok((ext, table))
    }
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &x| acc * p + x)
}

fn mul_by_t(c: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = c.len();
    let top = c[e - 1];
    let mut out = vec![0u32; e];
    for i in (1..e).rev() {
        out[i] = c[i - 1];
    }
    // t^e = -Σ m_i t^i
    if top != 0 {
        for i in 0..e {
            let sub = (top as u64 * modulus[i] as u64 % p as u64) as u32;
            out[i] = (out[i] + p - sub) % p;
        }
    }
    out
}

/// Multiply two residues mod `modulus` over F_p (slow path used only at construction).
fn mul_mod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = a.len();
    let mut acc = vec![0u32; e];
    let mut cur = b.to_vec();
    for &ai in a {
        if ai != 0 {
            for j in 0..e {
                acc[j] = ((acc[j] as u64 + ai as u64 * cur[j] as u64) % p as u64) as u32;
            }
        }
        cur = mul_by_t(&cur, modulus, p);
    }
    acc
}

fn pow_t(n: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut result = vec![0u32; e];
    result[0] = 1;
    let mut base = vec![0u32; e];
    if e == 1 {
        base[0] = (p - modulus[0]) % p;
    } else {
        base[1] = 1;
    }
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            result = mul_mod(&result, &base, modulus, p);
        }
        base = mul_mod(&base, &base, modulus, p);
        k >>= 1;
    }
    result
}

/// Smallest monic polynomial of degree e over F_p for which t has order p^e - 1.
fn find_primitive_modulus(p: u32, e: u32) -> Result<Vec<u32>> {
    let q = (p as u64).pow(e);
    let order = q - 1;
    let factors = prime_factors(order);
    let count = q; // candidates: lower coefficients
    for idx in 0..count {
        // c_{e-1} is the most significant digit.
        let mut m = vec![0u32; e as usize + 1];
        let mut x = idx;
        for slot in m.iter_mut().take(e as usize) {
            *slot = (x % p as u64) as u32;
            x /= p as u64;
        }
        m[e as usize] = 1;
        if m[0] == 0 {
            continue;
        }
        let one = {
            let mut v = vec![0u32; e as usize];
            v[0] = 1;
            v
        };
        if order == 1 {
            return Ok(m);
        }
        if pow_t(order, &m, p) != one {
            continue;
        }
        if factors.iter().all(|&r| pow_t(order / r, &m, p) != one) {
            return Ok(m);
        }
    }
    Err(Error::InvalidField(format!("no primitive polynomial of degree {e} over F_{p}")))
}
