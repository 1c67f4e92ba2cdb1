use std::fmt::Debug;
use std::sync::Arc;

use crate::groups::AbelianGroup;

/// A commutative ring with explicit element type.
pub trait Ring: Clone + Debug {
    type Elem: Clone + PartialEq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn pow(&self, a: &Self::Elem, mut n: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Self::Elem>) -> Self::Elem
    where
        Self::Elem: 'a,
    {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, x))
    }
}

/// A ring that is free of finite rank over Z/p^k, with coordinates in a fixed basis.
pub trait FiniteZpk: Ring {
    fn zpk(&self) -> ZMod;
    fn rank(&self) -> usize;
    fn to_coords(&self, a: &Self::Elem) -> Vec<u64>;
    fn from_coords(&self, c: &[u64]) -> Self::Elem;

    fn basis(&self) -> Vec<Self::Elem> {
        (0..self.rank())
            .map(|i| {
                let mut c = vec![0u64; self.rank()];
                c[i] = 1;
                self.from_coords(&c)
            })
            .collect()
    }
}

/// Z with overflow-checked i128 arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Integers;

impl Ring for Integers {
    type Elem = i128;
    fn zero(&self) -> i128 {
        0
    }
    fn one(&self) -> i128 {
        1
    }
    fn add(&self, a: &i128, b: &i128) -> i128 {
        a.checked_add(*b).expect("integer overflow")
    }
    fn neg(&self, a: &i128) -> i128 {
        -a
    }
    fn mul(&self, a: &i128, b: &i128) -> i128 {
        a.checked_mul(*b).expect("integer overflow")
    }
    fn from_i64(&self, n: i64) -> i128 {
        n as i128
    }
}

/// Z/p^k with p^k < 2^62.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ZMod {
    p: u64,
    k: u32,
    modulus: u64,
}

impl ZMod {
    pub fn new(p: u64, k: u32) -> ZMod {
        let modulus = p.checked_pow(k).filter(|&m| m < 1 << 62).expect("p^k must be below 2^62");
        ZMod { p, k, modulus }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn reduce_i128(&self, a: i128) -> u64 {
        a.rem_euclid(self.modulus as i128) as u64
    }

    /// p-adic valuation, k for zero.
    pub fn valuation(&self, a: u64) -> u32 {
        let a = a % self.modulus;
        if a == 0 {
            return self.k;
        }
        let mut v = 0;
        let mut x = a;
        while x % self.p == 0 {
            x /= self.p;
            v += 1;
        }
        v
    }

    pub fn is_unit(&self, a: u64) -> bool {
        a % self.p != 0
    }

    pub fn inv(&self, a: u64) -> Option<u64> {
        crate::numtheory::mod_inverse(a % self.modulus, self.modulus)
    }

    /// Signed representative in (−p^k/2, p^k/2].
    pub fn signed(&self, a: u64) -> i128 {
        let a = a as i128;
        let m = self.modulus as i128;
        if a > m / 2 {
            a - m
        } else {
            a
        }
    }

    /// Reduction Z/p^k → Z/p^j for j ≤ k.
    pub fn truncate(&self, j: u32) -> ZMod {
        ZMod::new(self.p, j.min(self.k))
    }
}

impl Ring for ZMod {
    type Elem = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.modulus
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        (a + b) % self.modulus
    }
    fn neg(&self, a: &u64) -> u64 {
        (self.modulus - a % self.modulus) % self.modulus
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.modulus as u128) as u64
    }
    fn from_i64(&self, n: i64) -> u64 {
        self.reduce_i128(n as i128)
    }
}

impl FiniteZpk for ZMod {
    fn zpk(&self) -> ZMod {
        *self
    }
    fn rank(&self) -> usize {
        1
    }
    fn to_coords(&self, a: &u64) -> Vec<u64> {
        vec![*a]
    }
    fn from_coords(&self, c: &[u64]) -> u64 {
        c[0] % self.modulus
    }
}

/// R[G] for a finite abelian group G; elements are coefficient vectors indexed by group index.
#[derive(Clone, Debug)]
pub struct GroupRing<R: Ring> {
    base: R,
    group: AbelianGroup,
    table: Option<Arc<Vec<u32>>>,
}

const TABLE_LIMIT: usize = 2048;

impl<R: Ring> GroupRing<R> {
    pub fn new(base: R, group: AbelianGroup) -> GroupRing<R> {
        let n = group.len();
        let table = (n <= TABLE_LIMIT).then(|| {
            let mut t = Vec::with_capacity(n * n);
            for a in 0..n {
                for b in 0..n {
                    t.push(group.mul_idx(a, b) as u32);
                }
            }
            Arc::new(t)
        });
        GroupRing { base, group, table }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    fn mul_idx(&self, a: usize, b: usize) -> usize {
        match &self.table {
            Some(t) => t[a * self.group.len() + b] as usize,
            None => self.group.mul_idx(a, b),
        }
    }

    /// The basis element [g].
    pub fn group_element(&self, idx: usize) -> Vec<R::Elem> {
        let mut v = vec![self.base.zero(); self.group.len()];
        v[idx] = self.base.one();
        v
    }

    pub fn scalar(&self, c: R::Elem) -> Vec<R::Elem> {
        let mut v = vec![self.base.zero(); self.group.len()];
        v[0] = c;
        v
    }

    pub fn scale(&self, c: &R::Elem, a: &[R::Elem]) -> Vec<R::Elem> {
        a.iter().map(|x| self.base.mul(c, x)).collect()
    }

    /// Multiply by the basis element [g].
    pub fn shift(&self, a: &[R::Elem], g: usize) -> Vec<R::Elem> {
        let mut out = vec![self.base.zero(); self.group.len()];
        for (i, x) in a.iter().enumerate() {
            out[self.mul_idx(i, g)] = x.clone();
        }
        out
    }

    /// Sum of coefficients.
    pub fn augmentation(&self, a: &[R::Elem]) -> R::Elem {
        self.base.sum(a.iter())
    }

    /// Σ a_g g ↦ Σ a_g g^{-1}.
    pub fn involution(&self, a: &[R::Elem]) -> Vec<R::Elem> {
        let mut out = vec![self.base.zero(); self.group.len()];
        for (i, x) in a.iter().enumerate() {
            out[self.group.inv_idx(i)] = x.clone();
        }
        out
    }

    /// Push forward along a group homomorphism given on indices.
    pub fn push_forward<S: Ring<Elem = R::Elem>>(
        &self,
        target: &GroupRing<S>,
        a: &[R::Elem],
        map: impl Fn(usize) -> usize,
    ) -> Vec<R::Elem> {
        let mut out = target.zero();
        for (i, x) in a.iter().enumerate() {
            let j = map(i);
            out[j] = target.base.add(&out[j], x);
        }
        out
    }
}

impl<R: Ring> Ring for GroupRing<R> {
    type Elem = Vec<R::Elem>;
    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.group.len()]
    }
    fn one(&self) -> Self::Elem {
        self.scalar(self.base.one())
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if self.base.is_zero(y) {
                    continue;
                }
                let t = self.mul_idx(i, j);
                out[t] = self.base.add(&out[t], &self.base.mul(x, y));
            }
        }
        out
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.scalar(self.base.from_i64(n))
    }
}

impl<R: FiniteZpk> FiniteZpk for GroupRing<R> {
    fn zpk(&self) -> ZMod {
        self.base.zpk()
    }
    fn rank(&self) -> usize {
        self.base.rank() * self.group.len()
    }
    fn to_coords(&self, a: &Self::Elem) -> Vec<u64> {
        a.iter().flat_map(|x| self.base.to_coords(x)).collect()
    }
    fn from_coords(&self, c: &[u64]) -> Self::Elem {
        c.chunks(self.base.rank()).map(|ch| self.base.from_coords(ch)).collect()
    }
}

/// Dense polynomial helpers over a ring (ascending coefficients).
fn poly_trim<R: Ring>(r: &R, mut a: Vec<R::Elem>) -> Vec<R::Elem> {
    while a.last().is_some_and(|x| r.is_zero(x)) {
        a.pop();
    }
    a
}

pub(crate) fn poly_mul<R: Ring>(r: &R, a: &[R::Elem], b: &[R::Elem]) -> Vec<R::Elem> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![r.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if r.is_zero(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = r.add(&out[i + j], &r.mul(x, y));
        }
    }
    poly_trim(r, out)
}

/// R[x]/(h) for monic h; elements have length deg h.
#[derive(Clone, Debug)]
pub struct QuotientRing<R: Ring> {
    base: R,
    /// Monic modulus, ascending, leading coefficient one.
    modulus: Vec<R::Elem>,
}

impl<R: Ring> QuotientRing<R> {
    pub fn new(base: R, modulus: Vec<R::Elem>) -> QuotientRing<R> {
        assert!(modulus.last().is_some_and(|c| *c == base.one()) && modulus.len() >= 2, "modulus must be monic of positive degree");
        QuotientRing { base, modulus }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn modulus(&self) -> &[R::Elem] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Reduce an arbitrary polynomial.
    pub fn reduce(&self, a: &[R::Elem]) -> Vec<R::Elem> {
        let d = self.degree();
        let mut r: Vec<R::Elem> = a.to_vec();
        while r.len() > d {
            let c = r.pop().expect("nonempty");
            if self.base.is_zero(&c) {
                continue;
            }
            let off = r.len() - d;
            for (j, m) in self.modulus[..d].iter().enumerate() {
                r[off + j] = self.base.sub(&r[off + j], &self.base.mul(&c, m));
            }
        }
        r.resize(d, self.base.zero());
        r
    }

    /// The class of x^j.
    pub fn x_pow(&self, j: u64) -> Vec<R::Elem> {
        let x = self.reduce(&[self.base.zero(), self.base.one()]);
        self.pow(&x, j)
    }
}

impl<R: Ring> Ring for QuotientRing<R> {
    type Elem = Vec<R::Elem>;
    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.degree()]
    }
    fn one(&self) -> Self::Elem {
        self.reduce(&[self.base.one()])
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.reduce(&poly_mul(&self.base, a, b))
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.reduce(&[self.base.from_i64(n)])
    }
}

impl<R: FiniteZpk> FiniteZpk for QuotientRing<R> {
    fn zpk(&self) -> ZMod {
        self.base.zpk()
    }
    fn rank(&self) -> usize {
        self.base.rank() * self.degree()
    }
    fn to_coords(&self, a: &Self::Elem) -> Vec<u64> {
        a.iter().flat_map(|x| self.base.to_coords(x)).collect()
    }
    fn from_coords(&self, c: &[u64]) -> Self::Elem {
        c.chunks(self.base.rank()).map(|ch| self.base.from_coords(ch)).collect()
    }
}

/// R[u]/(u^M).
#[derive(Clone, Debug)]
pub struct Truncated<R: Ring> {
    base: R,
    len: usize,
}

impl<R: Ring> Truncated<R> {
    pub fn new(base: R, len: usize) -> Truncated<R> {
        assert!(len >= 1);
        Truncated { base, len }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Truncate a polynomial given by coefficients.
    pub fn from_poly(&self, a: &[R::Elem]) -> Vec<R::Elem> {
        let mut v: Vec<R::Elem> = a.iter().take(self.len).cloned().collect();
        v.resize(self.len, self.base.zero());
        v
    }

    /// c·u^j.
    pub fn monomial(&self, c: R::Elem, j: usize) -> Vec<R::Elem> {
        let mut v = self.zero();
        if j < self.len {
            v[j] = c;
        }
        v
    }
}

impl<R: Ring> Ring for Truncated<R> {
    type Elem = Vec<R::Elem>;
    fn zero(&self) -> Self::Elem {
        vec![self.base.zero(); self.len]
    }
    fn one(&self) -> Self::Elem {
        self.monomial(self.base.one(), 0)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let mut out = self.zero();
        for (i, x) in a.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(self.len - i) {
                out[i + j] = self.base.add(&out[i + j], &self.base.mul(x, y));
            }
        }
        out
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.monomial(self.base.from_i64(n), 0)
    }
}

impl<R: FiniteZpk> FiniteZpk for Truncated<R> {
    fn zpk(&self) -> ZMod {
        self.base.zpk()
    }
    fn rank(&self) -> usize {
        self.base.rank() * self.len
    }
    fn to_coords(&self, a: &Self::Elem) -> Vec<u64> {
        a.iter().flat_map(|x| self.base.to_coords(x)).collect()
    }
    fn from_coords(&self, c: &[u64]) -> Self::Elem {
        c.chunks(self.base.rank()).map(|ch| self.base.from_coords(ch)).collect()
    }
}

/// R[u], unbounded; zero is the empty vector.
#[derive(Clone, Debug)]
pub struct Polys<R: Ring> {
    base: R,
}

impl<R: Ring> Polys<R> {
    pub fn new(base: R) -> Polys<R> {
        Polys { base }
    }

    pub fn base(&self) -> &R {
        &self.base
    }

    pub fn trim(&self, a: Vec<R::Elem>) -> Vec<R::Elem> {
        poly_trim(&self.base, a)
    }

    /// Evaluate at u = c.
    pub fn eval(&self, a: &[R::Elem], c: &R::Elem) -> R::Elem {
        a.iter().rev().fold(self.base.zero(), |acc, x| self.base.add(&self.base.mul(&acc, c), x))
    }
}

impl<R: Ring> Ring for Polys<R> {
    type Elem = Vec<R::Elem>;
    fn zero(&self) -> Self::Elem {
        vec![]
    }
    fn one(&self) -> Self::Elem {
        self.trim(vec![self.base.one()])
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        let n = a.len().max(b.len());
        let z = self.base.zero();
        self.trim((0..n).map(|i| self.base.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z))).collect())
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        poly_mul(&self.base, a, b)
    }
    fn from_i64(&self, n: i64) -> Self::Elem {
        self.trim(vec![self.base.from_i64(n)])
    }
    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.iter().all(|x| self.base.is_zero(x))
    }
}
