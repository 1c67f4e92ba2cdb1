use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::groups::AbelianGroup;
use crate::snf::{smith, vec_mat};

use super::factor::factor;
use super::field::{Fq, FqField};
use super::irreducible::monic_from_index;
use super::poly::FqPoly;

/// Default cap on the number of units enumerated by [`unit_group`].
pub const DEFAULT_UNIT_BUDGET: u64 = 4_000_000;

/// The residue ring A/𝔪 with canonical remainders as elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueRing {
    modulus: FqPoly,
}

impl ResidueRing {
    pub fn new(modulus: &FqPoly) -> Result<ResidueRing> {
        if modulus.deg() == 0 {
            return Err(Error::InvalidArgument("modulus must have positive degree".into()));
        }
        Ok(ResidueRing { modulus: modulus.monic() })
    }

    pub fn modulus(&self) -> &FqPoly {
        &self.modulus
    }

    pub fn field(&self) -> &Arc<FqField> {
        self.modulus.field()
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    /// |A/𝔪| = q^deg 𝔪 (None on overflow).
    pub fn size(&self) -> Option<u64> {
        (self.field().q() as u64).checked_pow(self.degree() as u32)
    }

    pub fn reduce(&self, a: &FqPoly) -> FqPoly {
        a.rem(&self.modulus)
    }

    pub fn mul(&self, a: &FqPoly, b: &FqPoly) -> FqPoly {
        a.mul_mod(b, &self.modulus)
    }

    pub fn pow(&self, a: &FqPoly, n: u64) -> FqPoly {
        a.pow_mod(n, &self.modulus)
    }

    pub fn is_unit(&self, a: &FqPoly) -> bool {
        self.reduce(a).gcd(&self.modulus).is_one()
    }

    pub fn inverse(&self, a: &FqPoly) -> Option<FqPoly> {
        a.inverse_mod(&self.modulus)
    }

    /// |(A/𝔪)^×| = ∏_{P^a ∥ 𝔪} (q^{d_P} − 1)·q^{d_P(a−1)}.
    pub fn unit_count(&self) -> Result<u64> {
        let q = self.field().q() as u64;
        let mut total = 1u64;
        for (pp, a) in factor(&self.modulus)? {
            let norm = q.pow(pp.deg() as u32);
            total =
                total.checked_mul((norm - 1) * norm.pow(a as u32 - 1)).ok_or_else(|| Error::Budget("unit group order overflows".into()))?;
        }
        Ok(total)
    }

    /// Integer key of a canonical remainder (base-q digits).
    pub fn key(&self, a: &FqPoly) -> u64 {
        let q = self.field().q() as u64;
        let r = self.reduce(a);
        (0..self.degree()).rev().fold(0u64, |acc, i| acc * q + r.coeff(i).0 as u64)
    }

    pub fn from_key(&self, mut key: u64) -> FqPoly {
        let q = self.field().q() as u64;
        let coeffs = (0..self.degree())
            .map(|_| {
                let c = Fq((key % q) as u32);
                key /= q;
                c
            })
            .collect();
        FqPoly::new(self.field(), coeffs)
    }

    /// Chinese remainder: the residue ≡ a mod 𝔪₁ and ≡ b mod 𝔪₂ (coprime), modulo 𝔪₁𝔪₂.
    pub fn crt(a: &FqPoly, m1: &FqPoly, b: &FqPoly, m2: &FqPoly) -> Result<FqPoly> {
        let (g, s, _) = m1.ext_gcd(m2);
        if !g.is_one() {
            return Err(Error::InvalidArgument(format!("{m1} and {m2} are not coprime")));
        }
        // x = a + m1 · s · (b − a) mod m1 m2, since s·m1 ≡ 1 mod m2.
        let m = m1 * m2;
        let x = &(a + &(m1 * &(&s * &(b - a)))).rem(&m);
        Ok(x.clone())
    }
}

/// (A/𝔪)^× in independent-generator form, with a discrete-logarithm table.
pub struct UnitGroup {
    ring: ResidueRing,
    group: AbelianGroup,
    generators: Vec<FqPoly>,
    raw_gens: Vec<FqPoly>,
    radices: Vec<u64>,
    table: HashMap<u64, u64>,
    to_coords: Vec<Vec<i128>>,
}

impl std::fmt::Debug for UnitGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "UnitGroup(mod {}, orders {:?})", self.ring.modulus(), self.group.orders())
    }
}

impl UnitGroup {
    pub fn ring(&self) -> &ResidueRing {
        &self.ring
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    /// Residues realizing the independent generators, one per coordinate.
    pub fn generators(&self) -> &[FqPoly] {
        &self.generators
    }

    /// Coordinates of a unit; errors if `a` is not a unit.
    pub fn dlog(&self, a: &FqPoly) -> Result<Vec<u64>> {
        let key = self.ring.key(a);
        let code =
            *self.table.get(&key).ok_or_else(|| Error::InvalidArgument(format!("{a} is not a unit modulo {}", self.ring.modulus())))?;
        let raw = decode(code, &self.radices);
        Ok(self.group.reduce(&vec_mat(&raw, &self.to_coords)))
    }

    /// Residue with the given coordinates.
    pub fn element(&self, x: &[u64]) -> FqPoly {
        let mut acc = FqPoly::one(self.ring.field());
        for (g, &e) in self.generators.iter().zip(x) {
            acc = self.ring.mul(&acc, &self.ring.pow(g, e));
        }
        self.ring.reduce(&acc)
    }
}

fn decode(mut code: u64, radices: &[u64]) -> Vec<i128> {
    radices
        .iter()
        .map(|&r| {
            let d = code % r;
            code /= r;
            d as i128
        })
        .collect()
}

/// Structure of (A/𝔪)^× with the default budget.
pub fn unit_group(ring: &ResidueRing) -> Result<UnitGroup> {
    unit_group_with_budget(ring, DEFAULT_UNIT_BUDGET)
}

/// Builds the unit group by adjoining generators one at a time: each new generator
/// contributes one relation (its relative order), giving a triangular relation
/// lattice that is then put in Smith form.
pub fn unit_group_with_budget(ring: &ResidueRing, budget: u64) -> Result<UnitGroup> {
    let expected = ring.unit_count()?;
    if expected > budget {
        return Err(Error::Budget(format!("|(A/𝔪)^×| = {expected} exceeds the unit budget {budget}")));
    }
    if ring.size().is_none() {
        return Err(Error::Budget("residue ring too large to index".into()));
    }
    let field = ring.field().clone();
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(expected as usize);
    let mut elements: Vec<FqPoly> = vec![FqPoly::one(&field)];
    table.insert(ring.key(&FqPoly::one(&field)), 0);
    let mut raw_gens: Vec<FqPoly> = Vec::new();
    let mut radices: Vec<u64> = Vec::new();
    let mut relations: Vec<(usize, u64, u64)> = Vec::new(); // (generator, relative order, code of h^k)

    let mut candidates: Box<dyn Iterator<Item = FqPoly>> = Box::new(std::iter::once(FqPoly::constant(&field, field.primitive_element())));
    for d in 1..ring.degree() {
        let count = (field.q() as u64).pow(d as u32);
        let f2 = field.clone();
        candidates = Box::new(candidates.chain((0..count).map(move |i| monic_from_index(&f2, d, i))));
    }
    for h in candidates {
        if elements.len() as u64 == expected {
            break;
        }
        let h = ring.reduce(&h);
        if h.is_zero() || !ring.is_unit(&h) || table.contains_key(&ring.key(&h)) {
            continue;
        }
        // Relative order of h modulo the current subgroup.
        let mut k = 1u64;
        let mut x = h.clone();
        while !table.contains_key(&ring.key(&x)) {
            x = ring.mul(&x, &h);
            k += 1;
        }
        let landing = table[&ring.key(&x)];
        let stride = elements.len() as u64;
        let base: Vec<FqPoly> = elements.clone();
        let mut hj = FqPoly::one(&field);
        for j in 1..k {
            hj = ring.mul(&hj, &h);
            for (c, e) in base.iter().enumerate() {
                let y = ring.mul(e, &hj);
                table.insert(ring.key(&y), c as u64 + j * stride);
                elements.push(y);
            }
        }
        relations.push((raw_gens.len(), k, landing));
        raw_gens.push(h);
        radices.push(k);
    }
    if elements.len() as u64 != expected {
        return Err(Error::Consistency(format!("enumerated {} units, closed form gives {expected}", elements.len())));
    }

    let r = raw_gens.len();
    let rows: Vec<Vec<i128>> = relations
        .iter()
        .map(|&(i, k, landing)| {
            let mut row = vec![0i128; r];
            let digits = decode(landing, &radices[..i]);
            for (j, d) in digits.into_iter().enumerate() {
                row[j] = -d;
            }
            row[i] += k as i128;
            row
        })
        .collect();
    let s = smith(&rows, r);
    let keep: Vec<usize> = (0..r).filter(|&j| s.diag[j] != 1).collect();
    let group = AbelianGroup::new(keep.iter().map(|&j| s.diag[j] as u64).collect());
    let to_coords: Vec<Vec<i128>> = s.v.iter().map(|row| keep.iter().map(|&j| row[j]).collect()).collect();
    let n = expected as i128;
    let generators = keep
        .iter()
        .map(|&j| {
            let mut acc = FqPoly::one(&field);
            for (h, &e) in raw_gens.iter().zip(&s.v_inv[j]) {
                acc = ring.mul(&acc, &ring.pow(h, e.rem_euclid(n) as u64));
            }
            acc
        })
        .collect();
    Ok(UnitGroup { ring: ring.clone(), group, generators, raw_gens, radices, table, to_coords })
}

impl UnitGroup {
    /// The raw generators adjoined during construction (diagnostics).
    pub fn raw_generators(&self) -> &[FqPoly] {
        &self.raw_gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(f: &Arc<FqField>, c: &[u32]) -> FqPoly {
        FqPoly::from_codes(f, c).unwrap()
    }

    #[test]
    fn spec_examples() {
        let f3 = FqField::prime(3).unwrap();
        let m = poly(&f3, &[1, 0, 1]);
        let g = unit_group(&ResidueRing::new(&m).unwrap()).unwrap();
        assert_eq!(g.group().orders(), &[8]);
        let g2 = unit_group(&ResidueRing::new(&(&m * &m)).unwrap()).unwrap();
        assert_eq!(g2.group().order(), 72);
        let f2 = FqField::prime(2).unwrap();
        let g3 = unit_group(&ResidueRing::new(&poly(&f2, &[0, 1])).unwrap()).unwrap();
        assert_eq!(g3.group().order(), 1);
    }

    #[test]
    fn dlog_is_a_homomorphism_and_inverts_element() {
        let f = FqField::prime(2).unwrap();
        let m = &poly(&f, &[1, 1, 1]).pow(2) * &poly(&f, &[0, 1]).pow(3);
        let ring = ResidueRing::new(&m).unwrap();
        let ug = unit_group(&ring).unwrap();
        assert_eq!(ug.group().order(), ring.unit_count().unwrap());
        for idx in 0..ug.group().len() {
            let x = ug.group().elem(idx);
            let a = ug.element(&x);
            assert_eq!(ug.dlog(&a).unwrap(), x);
        }
        let a = poly(&f, &[1, 1, 0, 1]);
        let b = poly(&f, &[1, 0, 1, 1, 1]);
        let ab = ring.mul(&a, &b);
        assert_eq!(ug.dlog(&ab).unwrap(), ug.group().mul(&ug.dlog(&a).unwrap(), &ug.dlog(&b).unwrap()));
    }

    #[test]
    fn crt_residue() {
        let f = FqField::prime(3).unwrap();
        let m1 = poly(&f, &[0, 1]);
        let m2 = poly(&f, &[1, 0, 1]);
        let a = poly(&f, &[2]);
        let b = poly(&f, &[1, 1]);
        let x = ResidueRing::crt(&a, &m1, &b, &m2).unwrap();
        assert_eq!(x.rem(&m1), a);
        assert_eq!(x.rem(&m2), b);
    }
}
