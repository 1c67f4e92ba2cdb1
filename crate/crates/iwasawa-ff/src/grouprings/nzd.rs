use serde::Serialize;

use crate::groups::AbelianGroup;

use super::ideal::{annihilator, is_unit};
use super::ring::{GroupRing, Ring, ZMod};

/// Two notions for f(γ) over R = Z/p^k[G]: a unit leading coefficient (which makes f
/// a non-zero divisor in R[[γ − 1]]), and the annihilator of f in the finite quotient
/// R[Γ/Γ^{p^M}], where γ − 1 itself is always a zero divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NzdCertificate {
    pub leading_unit: bool,
    pub truncation: u32,
    /// log_p |Ann(f)| in R[Γ/Γ^{p^M}].
    pub annihilator_log: u32,
    pub slack: Option<u32>,
    pub nzd_in_truncation: bool,
}

/// `f` lists the coefficients of f(γ) = Σ f_j γ^j, each an element of Z/p^k[G].
pub fn nzd_test_polynomial(ring: &GroupRing<ZMod>, f: &[Vec<u64>], truncation: u32) -> NzdCertificate {
    let z = *ring.base();
    let lead = f.iter().rev().find(|c| !ring.is_zero(c)).cloned().unwrap_or_else(|| ring.zero());
    let leading_unit = is_unit(ring, &lead).is_some();
    let cyc = z.p().pow(truncation);
    let mut orders = ring.group().orders().to_vec();
    orders.push(cyc);
    let big_group = AbelianGroup::new(orders);
    let big = GroupRing::new(z, big_group);
    let n = ring.group().len();
    let mut elem = big.zero();
    for (j, c) in f.iter().enumerate() {
        let off = (j as u64 % cyc) as usize * n;
        for (g, x) in c.iter().enumerate() {
            elem[off + g] = z.add(&elem[off + g], x);
        }
    }
    let ann = annihilator(&big, &elem);
    NzdCertificate { leading_unit, truncation, annihilator_log: ann.order_log, slack: ann.slack, nzd_in_truncation: ann.order_log == 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gamma_minus_one_distinguishes_notions() {
        let r = GroupRing::new(ZMod::new(3, 4), AbelianGroup::cyclic(4));
        let f = vec![r.from_i64(-1), r.one()];
        let c = nzd_test_polynomial(&r, &f, 2);
        assert!(c.leading_unit);
        assert!(!c.nzd_in_truncation);
        assert_eq!(c.slack, None);
    }

    #[test]
    fn one_minus_gamma_unit() {
        let r = GroupRing::new(ZMod::new(3, 4), AbelianGroup::cyclic(4));
        let a = r.group_element(1);
        let f = vec![r.one(), r.neg(&a)];
        let c = nzd_test_polynomial(&r, &f, 2);
        assert!(c.leading_unit);
        // 1 − γσ has a nontrivial annihilator too: σ has order 4, γ order 9, so σγ has order 36.
        assert!(!c.nzd_in_truncation);
        // With 3·γ the element becomes a unit in the finite ring.
        let f = vec![r.one(), r.scale(&3, &r.neg(&a))];
        assert!(nzd_test_polynomial(&r, &f, 2).nzd_in_truncation);
    }

    #[test]
    fn random_monic_cubics() {
        let r = GroupRing::new(ZMod::new(2, 5), AbelianGroup::cyclic(3));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10 {
            let mut f: Vec<Vec<u64>> = (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..32)).collect()).collect();
            f.push(r.one());
            let c = nzd_test_polynomial(&r, &f, 2);
            assert!(c.leading_unit);
            assert_eq!(c.truncation, 2);
            assert_eq!(c.nzd_in_truncation, c.annihilator_log == 0);
        }
    }
}
