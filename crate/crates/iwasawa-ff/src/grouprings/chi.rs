//! χ-components Z/p^k[G] → Z/p^k(χ)[P] for characters χ of the prime-to-p part Δ.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ffpoly::{factor, Fq, FqField, FqPoly};
use crate::groups::AbelianGroup;

use super::characters::{characters, cyclotomic_integer_poly, Character};
use super::ring::{poly_mul, FiniteZpk, GroupRing, QuotientRing, Ring, ZMod};
use super::zpk::smith_zpk;

fn to_fp(field: &std::sync::Arc<FqField>, a: &[u64]) -> FqPoly {
    let p = field.p() as u64;
    FqPoly::new(field, a.iter().map(|&c| Fq((c % p) as u32)).collect())
}

fn from_fp(a: &FqPoly) -> Vec<u64> {
    a.coeffs().iter().map(|c| c.0 as u64).collect()
}

fn zsub(z: &ZMod, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    (0..n).map(|i| z.sub(a.get(i).unwrap_or(&0), b.get(i).unwrap_or(&0))).collect()
}

/// Monic irreducible factor of Φ_d modulo p (the least one), lifted to Z/p^k by Hensel's lemma.
pub fn hensel_cyclotomic_factor(z: ZMod, d: u64) -> Result<Vec<u64>> {
    let p = z.p();
    if d % p == 0 {
        return Err(Error::InvalidArgument(format!("p = {p} divides the order {d}")));
    }
    let field = FqField::prime(p as u32)?;
    let phi: Vec<u64> = cyclotomic_integer_poly(d).iter().map(|&c| z.reduce_i128(c)).collect();
    let phi_p = to_fp(&field, &phi);
    let factors = factor(&phi_p)?;
    let h0 = factors.first().map(|(f, _)| f.clone()).ok_or_else(|| Error::Consistency("Φ_d has no factor mod p".into()))?;
    let g0 = phi_p.exact_div(&h0)?;
    let (one, _s, t) = h0.ext_gcd(&g0);
    if !one.is_one() {
        return Err(Error::Consistency(format!("Φ_{d} is not squarefree mod {p}")));
    }
    let mut h = from_fp(&h0);
    let mut g = from_fp(&g0);
    let mut pi = 1u64;
    for _ in 1..z.k() {
        pi *= p;
        let err = zsub(&z, &phi, &poly_mul(&z, &h, &g));
        if err.iter().any(|&c| c % pi != 0) {
            return Err(Error::Consistency("Hensel step lost precision".into()));
        }
        let e = to_fp(&field, &err.iter().map(|&c| c / pi).collect::<Vec<_>>());
        let big_h = (&t * &e).rem(&h0);
        let big_g = (&e - &(&g0 * &big_h)).exact_div(&h0)?;
        for (i, c) in from_fp(&big_h).into_iter().enumerate() {
            h[i] = z.add(&h[i], &z.mul(&c, &pi));
        }
        if g.len() < big_g.coeffs().len() {
            g.resize(big_g.coeffs().len(), 0);
        }
        for (i, c) in from_fp(&big_g).into_iter().enumerate() {
            g[i] = z.add(&g[i], &z.mul(&c, &pi));
        }
    }
    let err = zsub(&z, &phi, &poly_mul(&z, &h, &g));
    if err.iter().any(|&c| c != 0) {
        return Err(Error::Consistency("Hensel lift does not factor Φ_d".into()));
    }
    Ok(h)
}

/// One χ-component: Z/p^k[x]/(h)[P] together with the orbit of χ under χ ↦ χ^p.
#[derive(Clone, Debug)]
pub struct ChiComponent {
    pub character: Character,
    pub orbit: Vec<Character>,
    pub h: Vec<u64>,
    pub ring: GroupRing<QuotientRing<ZMod>>,
}

/// The decomposition Z/p^k[Δ × P] ≅ ⊕_{[χ]} Z/p^k(χ)[P].
#[derive(Clone, Debug)]
pub struct ChiComponents {
    z: ZMod,
    group: AbelianGroup,
    delta_rank: usize,
    delta: AbelianGroup,
    p_group: AbelianGroup,
    components: Vec<ChiComponent>,
}

impl ChiComponents {
    /// `group` has its first `delta_rank` coordinates spanning Δ with p ∤ |Δ|.
    pub fn new(z: ZMod, group: &AbelianGroup, delta_rank: usize) -> Result<ChiComponents> {
        let delta = AbelianGroup::new(group.orders()[..delta_rank].to_vec());
        let p_group = AbelianGroup::new(group.orders()[delta_rank..].to_vec());
        if delta.order() % z.p() == 0 {
            return Err(Error::InvalidArgument(format!("p = {} divides |Δ| = {}", z.p(), delta.order())));
        }
        if delta.rank() != delta_rank || p_group.order() * delta.order() != group.order() {
            return Err(Error::InvalidArgument("group is not ordered as Δ × P".into()));
        }
        let mut factors: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut components = Vec::new();
        for chi in characters(&delta) {
            if seen.contains(&chi) {
                continue;
            }
            let mut orbit = vec![chi.clone()];
            loop {
                let next = orbit.last().expect("nonempty").power(z.p() as i64);
                if next == chi {
                    break;
                }
                orbit.push(next);
            }
            seen.extend(orbit.iter().cloned());
            let d = chi.order();
            let h = match factors.get(&d) {
                Some(h) => h.clone(),
                None => {
                    let h = hensel_cyclotomic_factor(z, d)?;
                    factors.insert(d, h.clone());
                    h
                }
            };
            if h.len() - 1 != orbit.len() {
                return Err(Error::Consistency(format!("orbit size {} ≠ factor degree {}", orbit.len(), h.len() - 1)));
            }
            let ring = GroupRing::new(QuotientRing::new(z, h.clone()), p_group.clone());
            components.push(ChiComponent { character: chi, orbit, h, ring });
        }
        Ok(ChiComponents { z, group: group.clone(), delta_rank, delta, p_group, components })
    }

    pub fn components(&self) -> &[ChiComponent] {
        &self.components
    }

    pub fn source_ring(&self) -> GroupRing<ZMod> {
        GroupRing::new(self.z, self.group.clone())
    }

    pub fn delta(&self) -> &AbelianGroup {
        &self.delta
    }

    pub fn p_group(&self) -> &AbelianGroup {
        &self.p_group
    }

    /// Exponent j with χ(δ) = ζ_d^j, d the order of χ.
    fn zeta_exponent(chi: &Character, delta_coords: &[u64]) -> u64 {
        let e = chi.exponent_at(delta_coords);
        e / (chi.exponent / chi.order())
    }

    fn split_index(&self, idx: usize) -> (Vec<u64>, usize) {
        let x = self.group.elem(idx);
        let (d, p) = x.split_at(self.delta_rank);
        (d.to_vec(), self.p_group.index(p))
    }

    /// Image of a in the i-th component.
    pub fn project(&self, i: usize, a: &[u64]) -> Vec<Vec<u64>> {
        let comp = &self.components[i];
        let qr = comp.ring.base();
        let mut out = comp.ring.zero();
        for (idx, &c) in a.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let (d, pi) = self.split_index(idx);
            let j = Self::zeta_exponent(&comp.character, &d);
            let term = qr.x_pow(j).iter().map(|x| self.z.mul(x, &c)).collect::<Vec<_>>();
            out[pi] = qr.add(&out[pi], &term);
        }
        out
    }

    pub fn project_all(&self, a: &[u64]) -> Vec<Vec<Vec<u64>>> {
        (0..self.components.len()).map(|i| self.project(i, a)).collect()
    }

    /// The idempotent of the orbit of the i-th character, in Z/p^k[Δ] ⊂ Z/p^k[G].
    pub fn orbit_idempotent(&self, i: usize) -> Vec<u64> {
        let comp = &self.components[i];
        let qr = comp.ring.base();
        let z = &self.z;
        let inv_order = z.inv(self.delta.order() % z.modulus()).expect("|Δ| is a unit");
        let d = comp.character.order();
        let mut out = vec![0u64; self.group.len()];
        for delta in self.delta.elements() {
            let j = Self::zeta_exponent(&comp.character, &delta);
            let y = qr.x_pow((d - j % d) % d);
            // Trace of multiplication by y on the free module Z/p^k[x]/(h).
            let trace = (0..qr.degree()).fold(0u64, |acc, b| {
                let mut e = qr.zero();
                e[b] = 1;
                z.add(&acc, &qr.mul(&y, &e)[b])
            });
            let mut full = delta.clone();
            full.extend(std::iter::repeat(0).take(self.group.rank() - self.delta_rank));
            out[self.group.index(&full)] = z.mul(&trace, &inv_order);
        }
        out
    }

    /// Whether ⊕ project is bijective at this precision (unit determinant of the |G|×|G| matrix).
    pub fn is_injective(&self) -> bool {
        let n = self.group.len();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|idx| {
                let mut e = vec![0u64; n];
                e[idx] = 1;
                self.components.iter().enumerate().flat_map(|(i, c)| c.ring.to_coords(&self.project(i, &e))).collect()
            })
            .collect();
        let width = rows.first().map_or(0, |r| r.len());
        width == n && smith_zpk(self.z, &rows, width).cokernel_log() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouprings::ideal::is_unit;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hensel_factor_of_phi4_mod_5() {
        let z = ZMod::new(5, 6);
        let h = hensel_cyclotomic_factor(z, 4).unwrap();
        assert_eq!(h.len(), 2);
        // Root of x² + 1 in Z/5^6.
        let r = z.neg(&h[0]);
        assert_eq!(z.add(&z.mul(&r, &r), &1), 0);
        // x² + 1 stays irreducible mod 3.
        assert_eq!(hensel_cyclotomic_factor(ZMod::new(3, 5), 4).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn flagship_components() {
        let z = ZMod::new(3, 8);
        let g = AbelianGroup::new(vec![4, 3, 3]);
        let cc = ChiComponents::new(z, &g, 1).unwrap();
        // Characters of C_4 mod 3: {1}, {χ²}, {χ, χ³}.
        let mut degs: Vec<usize> = cc.components().iter().map(|c| c.h.len() - 1).collect();
        degs.sort();
        assert_eq!(degs, vec![1, 1, 2]);
        assert!(cc.is_injective());
        let src = cc.source_ring();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let a: Vec<u64> = (0..36).map(|_| rng.gen_range(0..z.modulus())).collect();
            let b: Vec<u64> = (0..36).map(|_| rng.gen_range(0..z.modulus())).collect();
            for (i, comp) in cc.components().iter().enumerate() {
                assert_eq!(cc.project(i, &src.mul(&a, &b)), comp.ring.mul(&cc.project(i, &a), &cc.project(i, &b)));
                assert_eq!(cc.project(i, &src.add(&a, &b)), comp.ring.add(&cc.project(i, &a), &cc.project(i, &b)));
                assert_eq!(cc.project(i, &src.one()), comp.ring.one());
                let e = cc.orbit_idempotent(i);
                assert_eq!(src.mul(&e, &e), e);
                for (j, other) in cc.components().iter().enumerate() {
                    let pe = cc.project(j, &src.mul(&e, &a));
                    if i == j {
                        assert_eq!(pe, cc.project(j, &a));
                    } else {
                        assert!(other.ring.is_zero(&pe));
                    }
                }
            }
            // Units are reflected.
            let unit_src = is_unit(&src, &a).is_some();
            let unit_parts = cc.components().iter().enumerate().all(|(i, c)| is_unit(&c.ring, &cc.project(i, &a)).is_some());
            assert_eq!(unit_src, unit_parts);
        }
    }

    #[test]
    fn rejects_p_dividing_delta() {
        let z = ZMod::new(2, 4);
        assert!(ChiComponents::new(z, &AbelianGroup::new(vec![4]), 1).is_err());
    }
}
