//! The layers as curves over F_q: two independent point counts (plane model and splitting
//! law), zeta numerators, S-divisor bookkeeping, the p-order of ∇_S and the characteristic
//! polynomial of Frobenius on the Tate module of the S-Picard 1-motive.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::bipoly::BiPoly;
use crate::carlitz::real_generator_minpoly;
use crate::error::{Error, Result};
use crate::ffpoly::{factor, irreducibles_of_degree, radical, FinitePlace, Fq, FqField, FqPoly, Place};
use crate::grouprings::{cyclotomic_ring, is_unit, Character, GroupRing, Ring, Truncated, ZMod};
use crate::groups::Subgroup;
use crate::lfun::{character_conductors, sigma_product, ThetaResult};
use crate::numtheory::valuation;
use crate::rayclass::{GaloisLayer, Hypotheses, TowerConfig};
use crate::zpoly;

pub const DEFAULT_POINT_BUDGET: u64 = 10_000_000;

/// The subfield L^K of a layer L fixed by a subgroup K of G.
#[derive(Clone, Debug)]
pub struct FixedField<'a> {
    layer: &'a GaloisLayer,
    kernel: Vec<Vec<u64>>,
    kernel_order: u64,
}

impl<'a> FixedField<'a> {
    /// L itself.
    pub fn full(layer: &'a GaloisLayer) -> FixedField<'a> {
        FixedField { layer, kernel: vec![], kernel_order: 1 }
    }

    /// L^K for K generated by `kernel`.
    pub fn new(layer: &'a GaloisLayer, kernel: Vec<Vec<u64>>) -> FixedField<'a> {
        let kernel_order = layer.group().span(&kernel).order();
        FixedField { layer, kernel, kernel_order }
    }

    pub fn from_subgroup(layer: &'a GaloisLayer, k: &Subgroup) -> FixedField<'a> {
        FixedField::new(layer, k.members().iter().map(|&i| layer.group().elem(i)).collect())
    }

    pub fn layer(&self) -> &GaloisLayer {
        self.layer
    }

    /// [L^K : k].
    pub fn degree(&self) -> u64 {
        self.layer.order() / self.kernel_order
    }

    fn image_order(&self, gens: &[Vec<u64>]) -> u64 {
        let mut all = gens.to_vec();
        all.extend(self.kernel.iter().cloned());
        self.layer.group().span(&all).order() / self.kernel_order
    }

    /// Places of L^K above v: (number of places, degree over F_q).
    pub fn splitting(&self, v: &Place) -> Result<(u64, usize)> {
        if v.is_infinite() {
            return Ok((self.degree(), 1));
        }
        let local = self.layer.local_data(v)?;
        let dk = self.image_order(&local.decomposition);
        let ik = self.image_order(&local.inertia);
        Ok((self.degree() / dk, v.degree() * (dk / ik) as usize))
    }

    /// Characters of G trivial on K.
    fn characters(&self) -> Vec<Character> {
        crate::grouprings::characters(self.layer.group()).into_iter().filter(|c| c.is_trivial_on(&self.kernel)).collect()
    }

    /// Genus by the conductor-discriminant formula: 2g − 2 = −2[L^K:k] + Σ_χ deg 𝔠_χ.
    pub fn genus_from_conductors(&self) -> Result<u64> {
        let chars = self.characters();
        let total: usize = character_conductors(self.layer)?.iter().filter(|c| chars.contains(&c.character)).map(|c| c.degree).sum();
        let twice = 2 + total as i64 - 2 * self.degree() as i64;
        if twice < 0 || twice % 2 != 0 {
            return Err(Error::Consistency(format!("conductor sum {total} gives no integral genus")));
        }
        Ok(twice as u64 / 2)
    }
}

fn check_budget(q: u64, i: usize, budget: u64) -> Result<u64> {
    let size = q.checked_pow(i as u32).filter(|&s| s <= budget);
    size.ok_or_else(|| Error::Budget(format!("q^{i} exceeds the point budget {budget}")))
}

/// N_i of L^K from the splitting law: places of k of degree dividing i, each contributing
/// its places of degree dividing i.
pub fn count_points_splitting(ff: &FixedField, i: usize, budget: u64) -> Result<u64> {
    if i == 0 {
        return Err(Error::InvalidArgument("i must be at least 1".into()));
    }
    let field = ff.layer.field();
    check_budget(field.q() as u64, i, budget)?;
    let mut total = ff.degree();
    for d in (1..=i).filter(|d| i % d == 0) {
        let places = irreducibles_of_degree(field, d)?;
        let part: u64 = places
            .into_par_iter()
            .map(|w| {
                let (count, deg) = ff.splitting(&Place::Finite(w))?;
                Ok(if i % deg == 0 { count * deg as u64 } else { 0 })
            })
            .collect::<Result<Vec<u64>>>()?
            .into_iter()
            .sum();
        total += part;
    }
    Ok(total)
}

/// A place of k over which the plane model is not used: its points come from class field theory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExceptionalFibre {
    pub place: String,
    pub places_above: u64,
    pub degree: usize,
    /// Distinct geometric points of the affine fibre over each root of the place, [L:k]/e.
    pub fibre_size: Option<u64>,
    #[serde(skip)]
    generator: Option<FqPoly>,
}

/// Affine plane model F(θ, X) = 0 of a layer, X = λ^{q−1} for λ a primitive 𝔪-torsion point.
#[derive(Clone, Debug, Serialize)]
pub struct CurveModel {
    pub degree: usize,
    #[serde(skip)]
    pub equation: BiPoly,
    pub exceptional: Vec<ExceptionalFibre>,
}

impl CurveModel {
    pub fn for_layer(layer: &GaloisLayer) -> Result<CurveModel> {
        let field = layer.field();
        let equation = match layer.modulus() {
            Some(m) if m.deg() > 0 => real_generator_minpoly(m)?,
            _ => BiPoly::x(field),
        };
        let degree = equation.degree().unwrap_or(0);
        if degree as u64 != layer.order() {
            return Err(Error::Consistency(format!("model degree {degree} ≠ |G| = {}", layer.order())));
        }
        let ff = FixedField::full(layer);
        let mut exceptional =
            vec![ExceptionalFibre { place: "inf".into(), places_above: layer.order(), degree: 1, fibre_size: None, generator: None }];
        if let Some(m) = layer.modulus().filter(|m| m.deg() > 0) {
            for (g, _) in factor(m)? {
                let w = FinitePlace::new(g.clone())?;
                let v = Place::Finite(w.clone());
                let (count, deg) = ff.splitting(&v)?;
                let e = layer.inertia_subgroup(&v)?.order();
                exceptional.push(ExceptionalFibre {
                    place: g.to_text(),
                    places_above: count,
                    degree: deg,
                    fibre_size: Some(layer.order() / e),
                    generator: Some(g),
                });
            }
        }
        Ok(CurveModel { degree, equation, exceptional })
    }

    pub fn field(&self) -> &std::sync::Arc<FqField> {
        self.equation.field()
    }
}

/// N_i from the plane model: affine roots over unramified θ₀, plus the exceptional places.
pub fn count_points_model(model: &CurveModel, i: usize, budget: u64) -> Result<u64> {
    if i == 0 {
        return Err(Error::InvalidArgument("i must be at least 1".into()));
    }
    let field = model.field();
    let size = check_budget(field.q() as u64, i, budget)?;
    let (ext, emb) = field.extension(i as u32, size)?;
    let fibres: Vec<(&ExceptionalFibre, &FqPoly, u64)> =
        model.exceptional.iter().filter_map(|e| Some((e, e.generator.as_ref()?, e.fibre_size?))).collect();
    let x = FqPoly::var(&ext);
    let affine: u64 = (0..size as u32)
        .into_par_iter()
        .map(|code| {
            let theta0 = Fq(code);
            let f = model.equation.specialize(&ext, &emb, theta0);
            for (e, g, expected) in &fibres {
                if g.eval_in(&ext, &emb, theta0).is_zero() {
                    let distinct = radical(&f)?.deg() as u64;
                    if distinct != *expected {
                        return Err(Error::FibreMismatch(format!(
                            "fibre over a root of {} has {distinct} points, the tables say {expected}",
                            e.place
                        )));
                    }
                    return Ok(0);
                }
            }
            if !f.gcd(&f.derivative()).is_one() {
                return Err(Error::FibreMismatch(format!("fibre over θ₀ = {code} is not separable at an unramified place")));
            }
            let frob = x.pow_mod(size, &f);
            Ok(f.gcd(&(&frob - &x)).deg() as u64)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    let exceptional: u64 = model.exceptional.iter().filter(|e| i % e.degree == 0).map(|e| e.places_above * e.degree as u64).sum();
    Ok(affine + exceptional)
}

/// Zeta data Z(u) = P(u)/((1 − u)(1 − qu)) reconstructed from point counts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZetaData {
    pub q: u64,
    pub counts: Vec<u64>,
    pub genus: usize,
    pub numerator: Vec<i128>,
    pub h: i128,
    /// Genus from the conductor-discriminant formula, when known; advisory only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus_from_conductors: Option<u64>,
}

/// Newton identities: k·c_k = −Σ_{j=1}^{k} s_j c_{k−j} with s_j = 1 + q^j − N_j.
pub fn zeta_numerator(counts: &[u64], q: u64) -> Result<ZetaData> {
    let m = counts.len();
    let qi = q as i128;
    let s: Vec<i128> = (1..=m).map(|j| 1 + qi.pow(j as u32) - counts[j - 1] as i128).collect();
    let mut c = vec![1i128];
    for k in 1..=m {
        let acc: i128 = (1..=k).map(|j| s[j - 1] * c[k - j]).sum();
        if acc % k as i128 != 0 {
            return Err(Error::Consistency(format!("counts admit no integral zeta numerator (degree {k})")));
        }
        c.push(-acc / k as i128);
    }
    for g in 0..=m / 2 {
        let tail_zero = c[2 * g + 1..].iter().all(|&x| x == 0);
        let symmetric = (0..=g).all(|k| c[2 * g - k] == qi.pow((g - k) as u32) * c[k]);
        if tail_zero && symmetric {
            let numerator = c[..=2 * g].to_vec();
            let h: i128 = numerator.iter().sum();
            if h <= 0 {
                return Err(Error::Consistency(format!("class number {h} is not positive")));
            }
            return Ok(ZetaData { q, counts: counts.to_vec(), genus: g, numerator, h, genus_from_conductors: None });
        }
    }
    Err(Error::Consistency(format!("no numerator of degree ≤ {m} satisfies the functional equation")))
}

impl ZetaData {
    /// N_i recomputed from the numerator.
    pub fn counts_from_numerator(&self, m: usize) -> Vec<i128> {
        // log P = −Σ s_j u^j / j: s_k = −k c_k − Σ_{j<k} s_j c_{k−j}.
        let c = |k: usize| self.numerator.get(k).copied().unwrap_or(0);
        let mut s: Vec<i128> = Vec::with_capacity(m);
        for k in 1..=m {
            let acc: i128 = (1..k).map(|j| s[j - 1] * c(k - j)).sum();
            s.push(-(k as i128) * c(k) - acc);
        }
        (1..=m).map(|j| 1 + (self.q as i128).pow(j as u32) - s[j - 1]).collect()
    }

    pub fn functional_equation_holds(&self) -> bool {
        let g = self.genus;
        let q = self.q as i128;
        self.numerator.len() == 2 * g + 1 && (0..=g).all(|k| self.numerator[2 * g - k] == q.pow((g - k) as u32) * self.numerator[k])
    }

    /// |N_i − q^i − 1| ≤ 2g·q^{i/2}, squared.
    pub fn weil_bounds_hold(&self) -> bool {
        let q = self.q as i128;
        let g = self.genus as i128;
        self.counts.iter().enumerate().all(|(i, &n)| {
            let a = n as i128 - q.pow(i as u32 + 1) - 1;
            a * a <= 4 * g * g * q.pow(i as u32 + 1)
        })
    }

    /// All reciprocal roots have absolute value √q: the trace polynomial H with
    /// u^{2g}P(1/u) = u^g H(u + q/u) is real-rooted with roots in [−2√q, 2√q].
    pub fn riemann_hypothesis_holds(&self) -> bool {
        let g = self.genus;
        if g == 0 {
            return true;
        }
        let q = BigInt::from(self.q);
        // E_0 = 2, E_1 = x, E_{j+1} = x·E_j − q·E_{j−1}.
        let mut e: Vec<Vec<BigInt>> = vec![vec![BigInt::from(2)], vec![BigInt::zero(), BigInt::one()]];
        for j in 1..g {
            let mut next = vec![BigInt::zero(); j + 2];
            for (k, a) in e[j].iter().enumerate() {
                next[k + 1] += a;
            }
            for (k, a) in e[j - 1].iter().enumerate() {
                next[k] -= &q * a;
            }
            e.push(next);
        }
        let mut h = vec![BigInt::zero(); g + 1];
        h[0] += BigInt::from(self.numerator[g]);
        for j in 1..=g {
            for (k, a) in e[j].iter().enumerate() {
                h[k] += BigInt::from(self.numerator[g - j]) * a;
            }
        }
        let h: Vec<BigRational> = h.into_iter().map(BigRational::from_integer).collect();
        let sq = sturm::squarefree(&h);
        if sturm::real_roots(&sq) != sturm::degree(&sq) {
            return false;
        }
        // K(z) = ∏(z − β²) from H(x)·H(−x); no root may exceed 4q.
        let hm: Vec<BigRational> = h.iter().enumerate().map(|(k, a)| if k % 2 == 1 { -a.clone() } else { a.clone() }).collect();
        let prod = sturm::mul(&h, &hm);
        let k: Vec<BigRational> = prod.iter().step_by(2).cloned().collect();
        let ksq = sturm::squarefree(&k);
        sturm::roots_above(&ksq, &BigRational::from_integer(BigInt::from(4) * q)) == 0
    }
}

mod sturm {
    use super::*;

    pub fn degree(p: &[BigRational]) -> usize {
        p.len().saturating_sub(1)
    }

    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        p
    }

    pub fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(out)
    }

    fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut r = trim(a.to_vec());
        let lead = b.last().expect("nonzero divisor").clone();
        while r.len() >= b.len() {
            let c = r.last().expect("nonempty").clone() / &lead;
            let shift = r.len() - b.len();
            for (j, y) in b.iter().enumerate() {
                r[shift + j] -= &c * y;
            }
            r.pop();
            r = trim(r);
        }
        r
    }

    fn div(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let mut r = trim(a.to_vec());
        let lead = b.last().expect("nonzero divisor").clone();
        let mut q = vec![BigRational::zero(); r.len().saturating_sub(b.len()) + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let c = r.last().expect("nonempty").clone() / &lead;
            let shift = r.len() - b.len();
            for (j, y) in b.iter().enumerate() {
                r[shift + j] -= &c * y;
            }
            q[shift] = c;
            r.pop();
            r = trim(r);
        }
        trim(q)
    }

    fn derivative(p: &[BigRational]) -> Vec<BigRational> {
        trim(p.iter().enumerate().skip(1).map(|(k, a)| a * BigRational::from_integer(BigInt::from(k))).collect())
    }

    fn gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let (mut x, mut y) = (trim(a.to_vec()), trim(b.to_vec()));
        while !y.is_empty() {
            let r = rem(&x, &y);
            x = y;
            y = r;
        }
        x
    }

    pub fn squarefree(p: &[BigRational]) -> Vec<BigRational> {
        let p = trim(p.to_vec());
        let d = derivative(&p);
        if d.is_empty() {
            return p;
        }
        div(&p, &gcd(&p, &d))
    }

    fn chain(p: &[BigRational]) -> Vec<Vec<BigRational>> {
        let mut seq = vec![trim(p.to_vec()), derivative(p)];
        while !seq.last().expect("nonempty").is_empty() {
            let n = seq.len();
            let r: Vec<BigRational> = rem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
            seq.push(r);
        }
        seq.pop();
        seq
    }

    fn variations(signs: impl Iterator<Item = i32>) -> usize {
        let nz: Vec<i32> = signs.filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    }

    fn sign(x: &BigRational) -> i32 {
        if x.is_positive() {
            1
        } else if x.is_negative() {
            -1
        } else {
            0
        }
    }

    fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
        p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    fn at_infinity(seq: &[Vec<BigRational>], negative: bool) -> usize {
        variations(seq.iter().map(|p| {
            let s = sign(p.last().expect("nonzero"));
            if negative && (p.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Distinct real roots of a square-free polynomial.
    pub fn real_roots(p: &[BigRational]) -> usize {
        if degree(p) == 0 {
            return 0;
        }
        let seq = chain(p);
        at_infinity(&seq, true) - at_infinity(&seq, false)
    }

    /// Distinct real roots in (a, ∞) of a square-free polynomial.
    pub fn roots_above(p: &[BigRational], a: &BigRational) -> usize {
        if degree(p) == 0 {
            return 0;
        }
        let seq = chain(p);
        variations(seq.iter().map(|s| sign(&eval(s, a)))) - at_infinity(&seq, false)
    }
}

/// Zeta data of L^K from splitting-law counts N_1..N_m, m = 2g + 2 with g from the conductors.
pub fn zeta_from_splitting(ff: &FixedField, budget: u64) -> Result<ZetaData> {
    let g = ff.genus_from_conductors()?;
    let m = 2 * g as usize + 2;
    let counts = (1..=m).map(|i| count_points_splitting(ff, i, budget)).collect::<Result<Vec<u64>>>()?;
    let mut z = zeta_numerator(&counts, ff.layer.field().q() as u64)?;
    z.genus_from_conductors = Some(g);
    Ok(z)
}

/// Places of L^K above S.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SPlaces {
    pub place: String,
    pub count: u64,
    pub degree: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SDivisorData {
    pub places: Vec<SPlaces>,
    pub total_places: u64,
    /// d_S: the positive generator of deg(Div_S).
    pub d_s: u64,
    pub div0_rank: u64,
    pub x_s_rank: u64,
    /// log_p |Z_p/d_S|.
    pub d_s_p_log: u32,
}

impl SDivisorData {
    /// Degrees d_w of the places w of L^K above S, with multiplicity.
    pub fn degrees(&self) -> Vec<usize> {
        self.places.iter().flat_map(|s| std::iter::repeat(s.degree).take(s.count as usize)).collect()
    }
}

pub fn s_divisors(cfg: &TowerConfig, ff: &FixedField) -> Result<SDivisorData> {
    let mut places = Vec::new();
    for v in cfg.s() {
        let (count, degree) = ff.splitting(v)?;
        places.push(SPlaces { place: v.label(), count, degree });
    }
    let total_places: u64 = places.iter().map(|s| s.count).sum();
    let d_s = places.iter().fold(0u64, |acc, s| crate::numtheory::gcd(acc, s.degree as u64));
    let p = cfg.field().p() as u64;
    let d_s_p_log = valuation(d_s as i128, p).unwrap_or(0);
    Ok(SDivisorData { places, total_places, d_s, div0_rank: total_places - 1, x_s_rank: total_places - 1, d_s_p_log })
}

/// Rank of X_S^χ: one per v ∈ S with χ trivial on D_v, less one for the trivial character.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NablaCharacter {
    pub character: Vec<u64>,
    pub x_s_rank: usize,
    pub finite: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NablaOrder {
    pub hypotheses: Hypotheses,
    /// log_p of the p-part of h(L_n).
    pub class_number_p_log: u32,
    pub d_s_p_log: u32,
    /// log_p |∇_S ⊗ Z_p| = log_p h_p + log_p |Z_p/d_S|.
    pub p_order_log: u32,
    /// log_p |∇_S^♯| = log_p h_p(L) − log_p h_p(L^Δ), since (Z_p/d_S)^♯ = 0.
    pub sharp_p_order_log: Option<u32>,
    pub characters: Vec<NablaCharacter>,
}

/// p-order of ∇_S^{(n)} in the case Div⁰_S = 0 (a single place of L_n above S).
pub fn nabla_order(
    cfg: &TowerConfig,
    layer: &GaloisLayer,
    zeta: &ZetaData,
    sdiv: &SDivisorData,
    delta_zeta: Option<&ZetaData>,
) -> Result<NablaOrder> {
    let hypotheses = cfg.hypotheses()?;
    if sdiv.total_places != 1 {
        let failing: Vec<&str> = [
            (!hypotheses.s_is_tower_prime_only).then_some("S = {𝔭}"),
            (!hypotheses.conductor_trivial).then_some("trivial conductor"),
            (!hypotheses.prime_generates_conductor_group).then_some("𝔭 generates the conductor group"),
        ]
        .into_iter()
        .flatten()
        .collect();
        return Err(Error::Unsupported(format!(
            "{} places of L_{} lie above S, so Div⁰_S ≠ 0 (failing: {})",
            sdiv.total_places,
            layer.n(),
            if failing.is_empty() { "S does not stay inert in the layer".to_string() } else { failing.join(", ") }
        )));
    }
    let p = cfg.field().p() as u64;
    let class_number_p_log = valuation(zeta.h, p).unwrap_or(0);
    let sharp_p_order_log = delta_zeta.map(|dz| class_number_p_log - valuation(dz.h, p).unwrap_or(0));
    let mut characters = Vec::new();
    for chi in crate::grouprings::characters(layer.group()) {
        let mut rank = 0usize;
        for v in cfg.s() {
            if chi.is_trivial_on(&layer.local_data(v)?.decomposition) {
                rank += 1;
            }
        }
        if chi.is_trivial() {
            rank -= 1;
        }
        characters.push(NablaCharacter { character: chi.values, x_s_rank: rank, finite: rank == 0 });
    }
    Ok(NablaOrder {
        hypotheses,
        class_number_p_log,
        d_s_p_log: sdiv.d_s_p_log,
        p_order_log: class_number_p_log + sdiv.d_s_p_log,
        sharp_p_order_log,
        characters,
    })
}

/// det(1 − Frob·u | T_p(M_S)) = P(u)·∏_{w∈S(L)}(1 − u^{d_w})/(1 − u).
pub fn tate_charpoly(ff: &FixedField, zeta: &ZetaData, sdiv: &SDivisorData) -> Result<Vec<i128>> {
    if ff.splitting(&Place::Infinity)?.1 != 1 {
        return Err(Error::Unsupported("constant field extension: places above ∞ are not rational".into()));
    }
    let mut num = zeta.numerator.clone();
    for d in sdiv.degrees() {
        num = zpoly::mul(&num, &zpoly::one_minus_monomial(1, d));
    }
    zpoly::div_exact(&num, &[1, -1]).ok_or_else(|| Error::Consistency("S-divisor factor not divisible by 1 − u".into()))
}

/// One rational character (a Galois orbit of characters with common kernel) in the
/// comparison of Θ with the characteristic polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitComparison {
    pub characters: Vec<Vec<u64>>,
    pub kernel_order: u64,
    /// ∏_orbit χ(Θ)(u), times (1 − qu) for the trivial character.
    pub theta_norm: Vec<i128>,
    /// The orbit's factor of det(1 − Frob·u | T_p(M_S)).
    pub charpoly_part: Vec<i128>,
    /// ∏_orbit χ(∏_{v∈Σ}(1 − σ_v^{-1}(qu)^{d_v})).
    pub sigma_norm: Vec<i128>,
    /// theta_norm = charpoly_part · sigma_norm exactly.
    pub identity_holds: bool,
    pub sigma_norm_unit: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CharpolyComparison {
    pub precision: u32,
    pub truncation: usize,
    pub orbits: Vec<OrbitComparison>,
    /// (1 − qu) and ∏_{v∈Σ}(1 − σ_v^{-1}(qu)^{d_v}) are units of Z/p^k[G][u]/(u^M).
    pub group_ring_units: bool,
    pub charpoly: Vec<i128>,
}

impl CharpolyComparison {
    pub fn holds(&self) -> bool {
        self.group_ring_units && self.orbits.iter().all(|o| o.identity_holds && o.sigma_norm_unit)
    }
}

fn norm_to_integers(ring: &crate::grouprings::CyclotomicRing, polys: &[Vec<Vec<i128>>]) -> Result<Vec<i128>> {
    let mut acc: Vec<Vec<i128>> = vec![ring.one()];
    for p in polys {
        let mut out = vec![ring.zero(); acc.len() + p.len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in p.iter().enumerate() {
                out[i + j] = ring.add(&out[i + j], &ring.mul(a, b));
            }
        }
        acc = out;
    }
    acc.iter()
        .map(|c| {
            if c.iter().skip(1).all(|&x| x == 0) {
                Ok(c.first().copied().unwrap_or(0))
            } else {
                Err(Error::Consistency("orbit product is not rational".into()))
            }
        })
        .collect::<Result<Vec<i128>>>()
        .map(zpoly::trim)
}

/// Compare Θ with the characteristic polynomial orbit by orbit, the fixed fields' zeta
/// functions coming from splitting-law counts.
pub fn charpoly_comparison(
    cfg: &TowerConfig,
    layer: &GaloisLayer,
    theta: &ThetaResult,
    precision: u32,
    truncation: usize,
    budget: u64,
) -> Result<CharpolyComparison> {
    let group = layer.group();
    let ring = cyclotomic_ring(group.exponent());
    let q = cfg.field().q() as i128;
    let p = cfg.field().p() as u64;

    let sigma_factor = sigma_product(cfg, layer)?;

    // Group characters by kernel; larger kernels first.
    let mut orbits: BTreeMap<Vec<usize>, Vec<Character>> = BTreeMap::new();
    for c in &theta.characters {
        let kernel: Vec<usize> = (0..group.len()).filter(|&i| c.character.exponent_at(&group.elem(i)) == 0).collect();
        orbits.entry(kernel).or_default().push(c.character.clone());
    }
    let mut keys: Vec<Vec<usize>> = orbits.keys().cloned().collect();
    keys.sort_by_key(|k| std::cmp::Reverse(k.len()));

    let mut parts: BTreeMap<Vec<usize>, Vec<i128>> = BTreeMap::new();
    let mut out = Vec::new();
    let mut full_charpoly = vec![1i128];
    let zt = Truncated::new(ZMod::new(p, precision), truncation);
    let reduce = |a: &[i128]| -> Vec<u64> { zt.from_poly(&a.iter().map(|&c| ZMod::new(p, precision).reduce_i128(c)).collect::<Vec<_>>()) };
    for key in &keys {
        let chars = &orbits[key];
        let ff = FixedField::new(layer, key.iter().map(|&i| group.elem(i)).collect());
        let zeta = zeta_from_splitting(&ff, budget)?;
        let sdiv = s_divisors(cfg, &ff)?;
        let mut part = tate_charpoly(&ff, &zeta, &sdiv)?;
        for (other, other_part) in &parts {
            if other.len() > key.len() && key.iter().all(|i| other.contains(i)) {
                part = zpoly::div_exact(&part, other_part)
                    .ok_or_else(|| Error::Consistency("fixed-field characteristic polynomials do not divide".into()))?;
            }
        }
        parts.insert(key.clone(), part.clone());
        full_charpoly = zpoly::mul(&full_charpoly, &part);

        let thetas: Vec<Vec<Vec<i128>>> = chars
            .iter()
            .map(|chi| theta.characters.iter().find(|c| &c.character == chi).map(|c| c.poly.clone()).expect("character of the layer"))
            .collect();
        let mut theta_norm = norm_to_integers(&ring, &thetas)?;
        let trivial = chars.iter().any(Character::is_trivial);
        if trivial {
            theta_norm = zpoly::mul(&theta_norm, &zpoly::one_minus_monomial(q, 1));
        }
        let sig: Vec<Vec<Vec<i128>>> = chars.iter().map(|chi| sigma_factor.iter().map(|c| chi.apply(&ring, group, c)).collect()).collect();
        let sigma_norm = norm_to_integers(&ring, &sig)?;
        let identity_holds = theta_norm == zpoly::mul(&part, &sigma_norm);
        let sigma_norm_unit = is_unit(&zt, &reduce(&sigma_norm)).is_some();
        out.push(OrbitComparison {
            characters: chars.iter().map(|c| c.values.clone()).collect(),
            kernel_order: key.len() as u64,
            theta_norm,
            charpoly_part: part,
            sigma_norm,
            identity_holds,
            sigma_norm_unit,
        });
    }

    let z = ZMod::new(p, precision);
    let gr = GroupRing::new(z, group.clone());
    let tr = Truncated::new(gr.clone(), truncation);
    let sigma_mod: Vec<Vec<u64>> = sigma_factor.iter().map(|c| c.iter().map(|&x| z.reduce_i128(x)).collect()).collect();
    let one_minus_qu = tr.sub(&tr.one(), &tr.monomial(gr.scalar(z.reduce_i128(q)), 1));
    let group_ring_units = is_unit(&tr, &tr.from_poly(&sigma_mod)).is_some() && is_unit(&tr, &one_minus_qu).is_some();

    // Sanity: the orbit parts multiply to the characteristic polynomial of L itself.
    let full = FixedField::full(layer);
    let zeta = zeta_from_splitting(&full, budget)?;
    let charpoly = tate_charpoly(&full, &zeta, &s_divisors(cfg, &full)?)?;
    if charpoly != full_charpoly {
        return Err(Error::Consistency("orbit parts do not multiply to the characteristic polynomial".into()));
    }
    Ok(CharpolyComparison { precision, truncation, orbits: out, group_ring_units, charpoly })
}
