//! Characters of finite abelian groups with exact values in Z[x]/Φ_N.

use serde::Serialize;

use crate::groups::AbelianGroup;
use crate::numtheory::{divisors, gcd, lcm, moebius};

use super::ring::{Integers, QuotientRing};

/// Integer coefficients of the N-th cyclotomic polynomial, ascending.
pub fn cyclotomic_integer_poly(n: u64) -> Vec<i128> {
    let mut num = vec![1i128];
    let mut den = vec![1i128];
    for d in divisors(n) {
        let mut xd = vec![0i128; d as usize + 1];
        xd[0] = -1;
        xd[d as usize] = 1;
        match moebius(n / d) {
            1 => num = super::ring::poly_mul(&Integers, &num, &xd),
            -1 => den = super::ring::poly_mul(&Integers, &den, &xd),
            _ => {}
        }
    }
    // Exact division by the monic denominator.
    let dd = den.len() - 1;
    let mut r = num;
    let mut q = vec![0i128; r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd];
        q[i] = c;
        for (j, &d) in den.iter().enumerate() {
            r[i + j] -= c * d;
        }
    }
    debug_assert!(r.iter().all(|&c| c == 0));
    q
}

/// Z[ζ_N] = Z[x]/Φ_N.
pub type CyclotomicRing = QuotientRing<Integers>;

pub fn cyclotomic_ring(n: u64) -> CyclotomicRing {
    if n == 1 {
        // Z as Z[x]/(x − 1).
        return QuotientRing::new(Integers, vec![-1, 1]);
    }
    QuotientRing::new(Integers, cyclotomic_integer_poly(n))
}

/// χ(g) = ζ_N^{Σ g_i c_i N/o_i}, N the exponent of the group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Character {
    pub values: Vec<u64>,
    #[serde(skip)]
    pub orders: Vec<u64>,
    pub exponent: u64,
}

impl Character {
    pub fn trivial(group: &AbelianGroup) -> Character {
        Character { values: vec![0; group.rank()], orders: group.orders().to_vec(), exponent: group.exponent() }
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&c| c == 0)
    }

    /// Order of χ.
    pub fn order(&self) -> u64 {
        self.values.iter().zip(&self.orders).fold(1, |acc, (&c, &o)| lcm(acc, o / gcd(o, c)))
    }

    /// χ(g) as an exponent of ζ_N.
    pub fn exponent_at(&self, g: &[u64]) -> u64 {
        let n = self.exponent;
        g.iter().zip(&self.values).zip(&self.orders).fold(0u64, |acc, ((&x, &c), &o)| (acc + (x % o) * c % o * (n / o)) % n)
    }

    pub fn is_trivial_on(&self, gens: &[Vec<u64>]) -> bool {
        gens.iter().all(|g| self.exponent_at(g) == 0)
    }

    pub fn conj(&self) -> Character {
        self.power(-1)
    }

    pub fn power(&self, e: i64) -> Character {
        let values = self.values.iter().zip(&self.orders).map(|(&c, &o)| ((c as i128 * e as i128).rem_euclid(o as i128)) as u64).collect();
        Character { values, orders: self.orders.clone(), exponent: self.exponent }
    }

    pub fn mul(&self, other: &Character) -> Character {
        let values = self.values.iter().zip(&other.values).zip(&self.orders).map(|((&a, &b), &o)| (a + b) % o).collect();
        Character { values, orders: self.orders.clone(), exponent: self.exponent }
    }

    /// Value in Z[ζ_N].
    pub fn value(&self, ring: &CyclotomicRing, g: &[u64]) -> Vec<i128> {
        ring.x_pow(self.exponent_at(g))
    }

    /// Σ a_g χ(g) for an integral group-ring element indexed by group index.
    pub fn apply(&self, ring: &CyclotomicRing, group: &AbelianGroup, a: &[i128]) -> Vec<i128> {
        let n = self.exponent as usize;
        let mut acc = vec![0i128; n];
        for (i, &c) in a.iter().enumerate() {
            if c != 0 {
                let e = self.exponent_at(&group.elem(i)) as usize;
                acc[e] = acc[e].checked_add(c).expect("overflow applying character");
            }
        }
        ring.reduce(&acc)
    }
}

/// All characters, in the order of the group's own indexing (c ↦ χ_c).
pub fn characters(group: &AbelianGroup) -> Vec<Character> {
    let n = group.exponent();
    group.elements().map(|c| Character { values: c, orders: group.orders().to_vec(), exponent: n }).collect()
}
