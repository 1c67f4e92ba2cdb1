//! Equivariant L-polynomials Θ_{S,Σ}(u) ∈ Z[G_n][u], computed as Euler products over the
//! places of k and certified by a vanishing window above a per-character degree bound.
//!
//! Each character is also evaluated along a separate path in Z[ζ_N][u], which must agree
//! with the character applied to the group-ring coefficients.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{factor, places_up_to, FinitePlace, Place};
use crate::grouprings::{characters, cyclotomic_ring, Character, CyclotomicRing, GroupRing, Integers, Ring, Truncated, ZMod};
use crate::groups::AbelianGroup;
use crate::rayclass::{build_layer, layer_projection, GaloisLayer, LayerMap, TowerConfig};
use crate::zpoly::{div_exact as div_exact_z, mul as mul_z, one_minus_monomial, trim as trim_z};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EulerMode {
    /// (1 − σ_v^{-1} u^{d_v})^{-1}, for v ∉ S.
    Inverse,
    /// 1 − σ_v^{-1} (qu)^{d_v}, for v ∈ Σ.
    Smoothing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerFactor {
    pub place: Place,
    pub degree: usize,
    pub frobenius: Vec<u64>,
    pub mode: EulerMode,
}

impl EulerFactor {
    /// Multiply a truncated series over Z[G] by this factor, in place.
    fn apply(&self, group: &AbelianGroup, q: i128, series: &mut [Vec<i128>]) {
        let g = group.inv_idx(group.index(&self.frobenius));
        let perm: Vec<usize> = (0..group.len()).map(|h| group.mul_idx(g, h)).collect();
        let d = self.degree;
        match self.mode {
            EulerMode::Inverse => {
                for j in d..series.len() {
                    let (lo, hi) = series.split_at_mut(j);
                    for (h, &c) in lo[j - d].iter().enumerate() {
                        hi[0][perm[h]] += c;
                    }
                }
            }
            EulerMode::Smoothing => {
                let scale = q.pow(d as u32);
                for j in (d..series.len()).rev() {
                    let (lo, hi) = series.split_at_mut(j);
                    for (h, &c) in lo[j - d].iter().enumerate() {
                        hi[0][perm[h]] -= scale * c;
                    }
                }
            }
        }
    }

    /// Same factor in Z[ζ_N][[u]] through the character χ.
    fn apply_character(&self, chi: &Character, ring: &CyclotomicRing, q: i128, series: &mut [Vec<i128>]) {
        let n = chi.exponent;
        let zeta = ring.x_pow((n - chi.exponent_at(&self.frobenius)) % n);
        let d = self.degree;
        match self.mode {
            EulerMode::Inverse => {
                for j in d..series.len() {
                    let t = ring.mul(&zeta, &series[j - d]);
                    series[j] = ring.add(&series[j], &t);
                }
            }
            EulerMode::Smoothing => {
                let scale = ring.from_i64(q.pow(d as u32) as i64);
                for j in (d..series.len()).rev() {
                    let t = ring.mul(&scale, &ring.mul(&zeta, &series[j - d]));
                    series[j] = ring.sub(&series[j], &t);
                }
            }
        }
    }
}

/// All Euler factors with d_v ≤ `degree`, in canonical order: v_∞, then finite places by degree.
pub fn euler_factors(cfg: &TowerConfig, layer: &GaloisLayer, degree: usize) -> Result<Vec<EulerFactor>> {
    let mut out = Vec::new();
    if !cfg.infinity_in_s() && degree >= 1 {
        out.push(EulerFactor { place: Place::Infinity, degree: 1, frobenius: layer.group().identity(), mode: EulerMode::Inverse });
    }
    for (i, places) in places_up_to(cfg.field(), degree)?.into_iter().enumerate() {
        let d = i + 1;
        let frobs: Vec<Option<(Place, Vec<u64>)>> = places
            .into_par_iter()
            .map(|w| {
                let v = Place::Finite(w);
                if cfg.in_s(&v) {
                    return Ok(None);
                }
                let f = layer.frobenius(&v)?;
                Ok(Some((v, f)))
            })
            .collect::<Result<_>>()?;
        for (place, frobenius) in frobs.into_iter().flatten() {
            out.push(EulerFactor { place, degree: d, frobenius, mode: EulerMode::Inverse });
        }
    }
    for w in cfg.sigma() {
        if w.degree() <= degree {
            let v = Place::Finite(w.clone());
            let frobenius = layer.frobenius(&v)?;
            out.push(EulerFactor { place: v, degree: w.degree(), frobenius, mode: EulerMode::Smoothing });
        }
    }
    Ok(out)
}

/// A polynomial in u with coefficients in Z[G], indexed by the group's element indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaPoly {
    pub group: AbelianGroup,
    pub coeffs: Vec<Vec<i128>>,
}

#[derive(Serialize)]
struct ThetaPolyJson {
    orders: Vec<u64>,
    degree: Option<usize>,
    coefficients: Vec<BTreeMap<String, i128>>,
}

impl Serialize for ThetaPoly {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let coefficients = self
            .coeffs
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (exponent_key(&self.group.elem(i)), x)).collect())
            .collect();
        ThetaPolyJson { orders: self.group.orders().to_vec(), degree: self.degree(), coefficients }.serialize(ser)
    }
}

fn exponent_key(x: &[u64]) -> String {
    let parts: Vec<String> = x.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(","))
}

impl ThetaPoly {
    fn trimmed(group: AbelianGroup, mut coeffs: Vec<Vec<i128>>) -> ThetaPoly {
        while coeffs.last().is_some_and(|c| c.iter().all(|&x| x == 0)) {
            coeffs.pop();
        }
        ThetaPoly { group, coeffs }
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, j: usize) -> Vec<i128> {
        self.coeffs.get(j).cloned().unwrap_or_else(|| vec![0; self.group.len()])
    }

    /// Θ(1) ∈ Z[G].
    pub fn value_at_one(&self) -> Vec<i128> {
        let mut out = vec![0i128; self.group.len()];
        for c in &self.coeffs {
            for (o, x) in out.iter_mut().zip(c) {
                *o += x;
            }
        }
        out
    }

    /// Coefficientwise push-forward along a layer map.
    pub fn project(&self, map: &LayerMap) -> ThetaPoly {
        let target = map.hom.target.clone();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let mut out = vec![0i128; target.len()];
                for (i, &x) in c.iter().enumerate() {
                    out[map.apply_idx(i)] += x;
                }
                out
            })
            .collect();
        ThetaPoly::trimmed(target, coeffs)
    }

    /// χ applied to each coefficient.
    pub fn apply_character(&self, chi: &Character, ring: &CyclotomicRing) -> Vec<Vec<i128>> {
        self.coeffs.iter().map(|c| chi.apply(ring, &self.group, c)).collect()
    }

    /// Human-readable table: one line per nonzero (degree, group element) pair.
    pub fn table(&self) -> String {
        let mut out = format!("Θ(u) over G = {:?}\n", self.group.orders());
        for (j, c) in self.coeffs.iter().enumerate() {
            for (i, &x) in c.iter().enumerate() {
                if x != 0 {
                    out.push_str(&format!("u^{j:<3} {:<16} {x}\n", exponent_key(&self.group.elem(i))));
                }
            }
        }
        out
    }
}

/// χ(Θ)(u) computed along the character path, with its degree bound.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterL {
    pub character: Character,
    /// deg 𝔠_χ, the conductor of the primitive character.
    pub conductor_degree: usize,
    pub bound: usize,
    /// Coefficients in Z[ζ_N], N the exponent of G.
    pub poly: Vec<Vec<i128>>,
    /// Agreement with χ applied to Θ.
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationCertificate {
    pub bound: usize,
    pub enumeration_degree: usize,
    /// Every coefficient of Θ in degrees (bound, enumeration_degree] is zero.
    pub window_vanishes: bool,
    /// Every χ(Θ) vanishes above its own bound.
    pub per_character_window_vanishes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThetaResult {
    pub n: usize,
    pub theta: ThetaPoly,
    pub certificate: StabilizationCertificate,
    pub characters: Vec<CharacterL>,
    /// Closed form of the trivial component, from the rational-function cancellation.
    pub trivial_closed_form: Vec<i128>,
}

impl ThetaResult {
    pub fn special_value(&self) -> Vec<i128> {
        self.theta.value_at_one()
    }

    /// Θ(1) reduced into Z/p^k[G].
    pub fn special_value_mod(&self, z: ZMod) -> Vec<u64> {
        self.special_value().into_iter().map(|c| z.reduce_i128(c)).collect()
    }
}

/// Trivial component as a rational function, ζ-pole and ∞-pole cancelled exactly:
/// ∏_{v∈S finite}(1 − u^{d_v}) · ∏_{v∈Σ}(1 − (qu)^{d_v}) / ((1 − qu)·(1 − u)^{[∞∉S]}).
pub fn trivial_component(cfg: &TowerConfig) -> Result<Vec<i128>> {
    let q = cfg.field().q() as i128;
    let mut num = vec![1i128];
    for v in cfg.s().iter().filter_map(Place::finite) {
        num = mul_z(&num, &one_minus_monomial(1, v.degree()));
    }
    for v in cfg.sigma() {
        num = mul_z(&num, &one_minus_monomial(q.pow(v.degree() as u32), v.degree()));
    }
    let mut den = one_minus_monomial(q, 1);
    if !cfg.infinity_in_s() {
        den = mul_z(&den, &one_minus_monomial(1, 1));
    }
    div_exact_z(&num, &den).ok_or_else(|| Error::Pole("trivial".into()))
}

/// Conductor of a character of the layer: its degree and the primes where it ramifies.
#[derive(Clone, Debug, Serialize)]
pub struct CharacterConductor {
    pub character: Character,
    pub degree: usize,
    pub ramified: Vec<FinitePlace>,
}

/// Conductors of all characters of the layer, by descent through the higher unit groups
/// at each prime of the modulus.
pub fn character_conductors(layer: &GaloisLayer) -> Result<Vec<CharacterConductor>> {
    let mut filtrations = Vec::new();
    if let Some(m) = layer.modulus() {
        if m.deg() > 0 {
            for (g, _) in factor(m)? {
                let w = FinitePlace::new(g)?;
                let filt = layer.unit_filtration(&w)?;
                filtrations.push((w, filt));
            }
        }
    }
    Ok(characters(layer.group())
        .into_iter()
        .map(|chi| {
            let mut degree = 0;
            let mut ramified = Vec::new();
            for (w, filt) in &filtrations {
                let e = filt.iter().position(|gens| chi.is_trivial_on(gens)).unwrap_or(filt.len());
                if e > 0 {
                    ramified.push(w.clone());
                }
                degree += e * w.degree();
            }
            CharacterConductor { character: chi, degree, ramified }
        })
        .collect())
}

fn character_bound(cfg: &TowerConfig, conductor_degree: usize, ramified: &[FinitePlace]) -> usize {
    let sigma: usize = cfg.sigma().iter().map(FinitePlace::degree).sum();
    let s_unram: usize = cfg.s().iter().filter_map(Place::finite).filter(|w| !ramified.contains(w)).map(FinitePlace::degree).sum();
    let inf = usize::from(!cfg.infinity_in_s());
    // deg 𝔠 − 1 for the primitive L-polynomial (the pole 1/(1 − qu) when χ = 1), less the ∞ factor.
    (conductor_degree + s_unram + sigma).saturating_sub(1 + inf)
}

/// Θ^{(n)}_{S,Σ}(u) for the n-th layer of the tower.
pub fn theta(cfg: &TowerConfig, n: usize, degree: Option<usize>) -> Result<ThetaResult> {
    theta_for_layer(cfg, &build_layer(cfg, n)?, degree)
}

/// Θ_{S,Σ}(u) for any layer whose ramified primes lie in S (including the trivial layer).
pub fn theta_for_layer(cfg: &TowerConfig, layer: &GaloisLayer, degree: Option<usize>) -> Result<ThetaResult> {
    let group = layer.group().clone();
    let conductors = character_conductors(layer)?;
    let chars: Vec<Character> = conductors.iter().map(|c| c.character.clone()).collect();
    let meta: Vec<(usize, usize)> = conductors.iter().map(|c| (c.degree, character_bound(cfg, c.degree, &c.ramified))).collect();
    let bound = meta.iter().map(|m| m.1).max().unwrap_or(0);
    let d = match degree {
        Some(d) if d < bound => return Err(Error::InvalidArgument(format!("enumeration degree {d} is below the degree bound {bound}"))),
        Some(d) => d,
        None => bound + 4,
    };
    let q = cfg.field().q() as i128;
    let factors = euler_factors(cfg, layer, d)?;

    let mut series = vec![vec![0i128; group.len()]; d + 1];
    series[0][0] = 1;
    for f in &factors {
        f.apply(&group, q, &mut series);
    }
    let window_vanishes = series[bound + 1..].iter().all(|c| c.iter().all(|&x| x == 0));
    if !window_vanishes {
        let j = (bound + 1..=d).find(|&j| series[j].iter().any(|&x| x != 0)).expect("nonzero coefficient");
        return Err(Error::Stabilization { degree: j, detail: format!("Θ coefficient nonzero above bound {bound}") });
    }
    let theta = ThetaPoly::trimmed(group.clone(), series);

    let ring = cyclotomic_ring(group.exponent());
    let characters: Vec<CharacterL> = chars
        .into_par_iter()
        .zip(meta.into_par_iter())
        .map(|(chi, (conductor_degree, bound))| {
            let mut s = vec![ring.zero(); d + 1];
            s[0] = ring.one();
            for f in &factors {
                f.apply_character(&chi, &ring, q, &mut s);
            }
            let mut expected = theta.apply_character(&chi, &ring);
            expected.resize(d + 1, ring.zero());
            let consistent = expected == s;
            while s.len() > 1 && s.last().is_some_and(|c| ring.is_zero(c)) {
                s.pop();
            }
            CharacterL { character: chi, conductor_degree, bound, poly: s, consistent }
        })
        .collect();
    let per_character_window_vanishes = characters.iter().all(|c| c.poly.len() <= c.bound + 1);
    if let Some(c) = characters.iter().find(|c| c.poly.len() > c.bound + 1) {
        return Err(Error::Stabilization {
            degree: c.poly.len() - 1,
            detail: format!("χ = {:?} exceeds its bound {}", c.character.values, c.bound),
        });
    }
    if let Some(c) = characters.iter().find(|c| !c.consistent) {
        return Err(Error::Consistency(format!("character path disagrees with Θ for χ = {:?}", c.character.values)));
    }
    let trivial_closed_form = trivial_component(cfg)?;
    let augmentation: Vec<i128> = trim_z(theta.coeffs.iter().map(|c| c.iter().sum()).collect());
    if augmentation != trivial_closed_form {
        return Err(Error::Consistency(format!("trivial component {augmentation:?} differs from the closed form {trivial_closed_form:?}")));
    }
    Ok(ThetaResult {
        n: layer.n(),
        theta,
        certificate: StabilizationCertificate { bound, enumeration_degree: d, window_vanishes, per_character_window_vanishes },
        characters,
        trivial_closed_form,
    })
}

/// Recompute at two more degrees and compare coefficientwise.
pub fn stability_recheck(cfg: &TowerConfig, layer: &GaloisLayer, result: &ThetaResult) -> Result<bool> {
    let again = theta_for_layer(cfg, layer, Some(result.certificate.enumeration_degree + 2))?;
    Ok(again.theta == result.theta)
}

/// Multiplicity of u = 1 against the count of v ∈ S with χ trivial on D_v.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    pub character: Vec<u64>,
    pub computed: usize,
    pub predicted: usize,
    pub places: Vec<String>,
}

impl VanishingReport {
    pub fn agrees(&self) -> bool {
        self.computed == self.predicted
    }
}

fn root_one_multiplicity(ring: &CyclotomicRing, poly: &[Vec<i128>]) -> Result<usize> {
    let mut p: Vec<Vec<i128>> = poly.to_vec();
    if p.iter().all(|c| ring.is_zero(c)) {
        return Err(Error::InvalidArgument("zero polynomial".into()));
    }
    let mut mult = 0;
    loop {
        let value = ring.sum(p.iter());
        if !ring.is_zero(&value) || p.len() < 2 {
            return Ok(mult);
        }
        // Synthetic division by u − 1.
        let mut quo = vec![ring.zero(); p.len() - 1];
        let mut carry = ring.zero();
        for j in (1..p.len()).rev() {
            carry = ring.add(&carry, &p[j]);
            quo[j - 1] = carry.clone();
        }
        p = quo;
        mult += 1;
    }
}

/// Order of vanishing at u = 1 of χ(Θ) for a nontrivial χ of the layer.
pub fn order_of_vanishing(cfg: &TowerConfig, layer: &GaloisLayer, result: &ThetaResult, chi: &Character) -> Result<VanishingReport> {
    if chi.is_trivial() {
        return Err(Error::InvalidArgument("the order-of-vanishing identity needs a nontrivial character".into()));
    }
    let entry = result
        .characters
        .iter()
        .find(|c| &c.character == chi)
        .ok_or_else(|| Error::InvalidArgument(format!("χ = {:?} is not a character of this layer", chi.values)))?;
    let ring = cyclotomic_ring(layer.group().exponent());
    let computed = root_one_multiplicity(&ring, &entry.poly)?;
    let mut places = Vec::new();
    for v in cfg.s() {
        if chi.is_trivial_on(&layer.local_data(v)?.decomposition) {
            places.push(v.label());
        }
    }
    Ok(VanishingReport { character: chi.values.clone(), computed, predicted: places.len(), places })
}

/// Convenience form building the layer and Θ.
pub fn order_of_vanishing_check(cfg: &TowerConfig, n: usize, chi: &Character) -> Result<(usize, usize)> {
    let layer = build_layer(cfg, n)?;
    let result = theta_for_layer(cfg, &layer, None)?;
    let r = order_of_vanishing(cfg, &layer, &result, chi)?;
    Ok((r.computed, r.predicted))
}

/// Reports for every nontrivial character of the layer.
pub fn order_of_vanishing_all(cfg: &TowerConfig, layer: &GaloisLayer, result: &ThetaResult) -> Result<Vec<VanishingReport>> {
    result.characters.iter().filter(|c| !c.character.is_trivial()).map(|c| order_of_vanishing(cfg, layer, result, &c.character)).collect()
}

/// Inverse of 1 − σ_v^{-1}(qu)^{d_v} in Z/p^k[G][u]/(u^M), by the geometric series.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaUnitWitness {
    pub place: String,
    pub precision: u32,
    pub truncation: usize,
    pub factor: Vec<Vec<u64>>,
    pub inverse: Vec<Vec<u64>>,
    pub verified: bool,
}

pub fn sigma_factor_unit(
    cfg: &TowerConfig,
    layer: &GaloisLayer,
    v: &FinitePlace,
    precision: u32,
    truncation: usize,
) -> Result<SigmaUnitWitness> {
    if !cfg.sigma().contains(v) {
        return Err(Error::InvalidArgument(format!("{v} is not in Σ")));
    }
    if truncation == 0 {
        return Err(Error::InvalidArgument("truncation must be positive".into()));
    }
    let z = ZMod::new(cfg.field().p() as u64, precision);
    let gr = GroupRing::new(z, layer.group().clone());
    let ring = Truncated::new(gr.clone(), truncation);
    let group = layer.group();
    let g = group.inv_idx(group.index(&layer.frobenius(&Place::Finite(v.clone()))?));
    let d = v.degree();
    let qd = z.pow(&(cfg.field().q() as u64 % z.modulus()), d as u64);
    let step = gr.scale(&qd, &gr.group_element(g));
    let factor = ring.sub(&ring.one(), &ring.monomial(step.clone(), d));
    let mut inverse = ring.zero();
    let mut power = gr.one();
    let mut j = 0;
    while j < truncation {
        inverse[j] = power.clone();
        power = gr.mul(&power, &step);
        j += d;
    }
    let verified = ring.mul(&factor, &inverse) == ring.one();
    Ok(SigmaUnitWitness { place: v.gen().to_text(), precision, truncation, factor, inverse, verified })
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctorialityReport {
    pub top_n: usize,
    pub base_n: usize,
    pub equal: bool,
    pub first_mismatch: Option<usize>,
    pub projected: ThetaPoly,
    pub base: ThetaPoly,
}

/// Push Θ of the top layer down to the base layer and compare with Θ of the base.
pub fn compare_projected(map: &LayerMap, top: &ThetaResult, base: &ThetaResult) -> FunctorialityReport {
    let projected = top.theta.project(map);
    let len = projected.coeffs.len().max(base.theta.coeffs.len());
    let first_mismatch = (0..len).find(|&j| projected.coeff(j) != base.theta.coeff(j));
    FunctorialityReport {
        top_n: top.n,
        base_n: base.n,
        equal: first_mismatch.is_none(),
        first_mismatch,
        projected,
        base: base.theta.clone(),
    }
}

pub fn functoriality_check(cfg: &TowerConfig, top_n: usize, base_n: usize) -> Result<FunctorialityReport> {
    let top = build_layer(cfg, top_n)?;
    let base = build_layer(cfg, base_n)?;
    let map = layer_projection(&top, &base)?;
    let t = theta_for_layer(cfg, &top, None)?;
    let b = theta_for_layer(cfg, &base, None)?;
    Ok(compare_projected(&map, &t, &b))
}

/// ∏_{v∈Σ}(1 − σ_v^{-1}(qu)^{d_v}) in Z[G][u], coefficient j at index j.
pub fn sigma_product(cfg: &TowerConfig, layer: &GaloisLayer) -> Result<Vec<Vec<i128>>> {
    let group = layer.group();
    let gr = GroupRing::new(Integers, group.clone());
    let q = cfg.field().q() as i128;
    let mut acc = vec![gr.one()];
    for w in cfg.sigma() {
        let g = group.inv_idx(group.index(&layer.frobenius(&Place::Finite(w.clone()))?));
        let d = w.degree();
        let mut out = vec![gr.zero(); acc.len() + d];
        let step = gr.scale(&-q.pow(d as u32), &gr.group_element(g));
        for (i, a) in acc.iter().enumerate() {
            out[i] = gr.add(&out[i], a);
            out[i + d] = gr.add(&out[i + d], &gr.mul(a, &step));
        }
        acc = out;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{FqField, FqPoly};
    use std::sync::Arc;

    fn place(f: &Arc<FqField>, c: &[u32]) -> FinitePlace {
        FinitePlace::new(FqPoly::from_codes(f, c).unwrap()).unwrap()
    }

    fn flagship_q3() -> TowerConfig {
        let f = FqField::prime(3).unwrap();
        TowerConfig::new(&FqPoly::one(&f), &place(&f, &[1, 0, 1]), None, vec![place(&f, &[0, 1])]).unwrap()
    }

    fn flagship_q2() -> TowerConfig {
        let f = FqField::prime(2).unwrap();
        TowerConfig::new(&FqPoly::one(&f), &place(&f, &[1, 1, 1]), None, vec![place(&f, &[0, 1])]).unwrap()
    }

    #[test]
    fn degenerate_layer_gives_one_minus_u() {
        let f = FqField::prime(2).unwrap();
        let theta_place = place(&f, &[0, 1]);
        let cfg = TowerConfig::new(
            &FqPoly::one(&f),
            &theta_place,
            Some(vec![Place::Infinity, Place::Finite(theta_place.clone())]),
            vec![place(&f, &[1, 1])],
        )
        .unwrap();
        let r = theta(&cfg, 0, Some(12)).unwrap();
        assert_eq!(r.theta.group.order(), 1);
        assert_eq!(r.theta.coeffs, vec![vec![1], vec![-1]]);
        // ζ_A(u) = 1/(1 − 2u); removing (θ) and smoothing at (θ + 1) gives (1 − u)(1 − 2u)/(1 − 2u).
        assert_eq!(r.trivial_closed_form, vec![1, -1]);
        assert_eq!(r.special_value(), vec![0]);
    }

    #[test]
    fn flagship_q3_layer0() {
        let cfg = flagship_q3();
        let r = theta(&cfg, 0, None).unwrap();
        assert_eq!(r.theta.group.orders(), &[4]);
        // Trivial component (1 − u²)(1 − 3u)/((1 − 3u)(1 − u)) = 1 + u.
        assert_eq!(r.trivial_closed_form, vec![1, 1]);
        let aug: i128 = r.special_value().iter().sum();
        assert_eq!(aug, 2);
        assert!(r.certificate.window_vanishes && r.certificate.per_character_window_vanishes);
        assert!(r.characters.iter().all(|c| c.consistent));
        // Faithful characters have conductor 𝔭 of degree 2.
        for c in &r.characters {
            let expected = if c.character.is_trivial() { 0 } else { 2 };
            assert_eq!(c.conductor_degree, expected);
        }
        let layer = build_layer(&cfg, 0).unwrap();
        assert!(stability_recheck(&cfg, &layer, &r).unwrap());
    }

    #[test]
    fn per_character_values_q3() {
        // χ(Θ) = 1 − 3·χ̄(σ_θ)u for nontrivial χ: the L-function of conductor 𝔭 is 1 − u,
        // cancelled by the ∞ factor.
        let cfg = flagship_q3();
        let layer = build_layer(&cfg, 0).unwrap();
        let r = theta_for_layer(&cfg, &layer, None).unwrap();
        let ring = cyclotomic_ring(4);
        let frob = layer.frobenius(&Place::Finite(cfg.sigma()[0].clone())).unwrap();
        for c in r.characters.iter().filter(|c| !c.character.is_trivial()) {
            let zeta = ring.x_pow((4 - c.character.exponent_at(&frob)) % 4);
            let expected = vec![ring.one(), ring.neg(&ring.mul(&ring.from_i64(3), &zeta))];
            assert_eq!(c.poly, expected);
        }
    }

    #[test]
    fn both_flagships_two_layers() {
        for cfg in [flagship_q3(), flagship_q2()] {
            for n in 0..2 {
                let layer = build_layer(&cfg, n).unwrap();
                let r = theta_for_layer(&cfg, &layer, None).unwrap();
                assert!(stability_recheck(&cfg, &layer, &r).unwrap());
                for rep in order_of_vanishing_all(&cfg, &layer, &r).unwrap() {
                    assert!(rep.agrees(), "{rep:?}");
                }
            }
            let rep = functoriality_check(&cfg, 1, 0).unwrap();
            assert!(rep.equal, "{:?}", rep.first_mismatch);
            assert!(functoriality_check(&cfg, 0, 0).unwrap().equal);
        }
    }

    #[test]
    fn projection_to_trivial_layer() {
        let cfg = flagship_q3();
        let layer = build_layer(&cfg, 0).unwrap();
        let trivial = GaloisLayer::trivial(cfg.field());
        let top = theta_for_layer(&cfg, &layer, None).unwrap();
        let bottom = theta_for_layer(&cfg, &trivial, None).unwrap();
        let map = layer_projection(&layer, &trivial).unwrap();
        assert!(compare_projected(&map, &top, &bottom).equal);
        assert_eq!(bottom.theta.coeffs.iter().map(|c| c[0]).collect::<Vec<_>>(), bottom.trivial_closed_form);
        // Θ(1) commutes with projection.
        assert_eq!(top.theta.project(&map).value_at_one(), bottom.special_value());
    }

    #[test]
    fn vanishing_with_nontrivial_conductor() {
        let f = FqField::prime(3).unwrap();
        let cfg =
            TowerConfig::new(&FqPoly::from_codes(&f, &[0, 1]).unwrap(), &place(&f, &[1, 0, 1]), None, vec![place(&f, &[1, 1])]).unwrap();
        let layer = build_layer(&cfg, 0).unwrap();
        let r = theta_for_layer(&cfg, &layer, None).unwrap();
        let reports = order_of_vanishing_all(&cfg, &layer, &r).unwrap();
        assert!(reports.iter().all(VanishingReport::agrees), "{reports:?}");
        assert!(reports.iter().any(|rep| rep.predicted == 1));
        assert!(order_of_vanishing(&cfg, &layer, &r, &Character::trivial(layer.group())).is_err());
    }

    #[test]
    fn infinity_in_s_adds_a_zero() {
        let f = FqField::prime(3).unwrap();
        let p = place(&f, &[1, 0, 1]);
        let cfg = TowerConfig::new(&FqPoly::one(&f), &p, Some(vec![Place::Infinity, Place::Finite(p.clone())]), vec![place(&f, &[0, 1])])
            .unwrap();
        let layer = build_layer(&cfg, 0).unwrap();
        let r = theta_for_layer(&cfg, &layer, None).unwrap();
        for rep in order_of_vanishing_all(&cfg, &layer, &r).unwrap() {
            assert_eq!(rep.predicted, 1);
            assert!(rep.agrees());
        }
    }

    #[test]
    fn sigma_unit_witness() {
        let cfg = flagship_q3();
        let layer = build_layer(&cfg, 0).unwrap();
        let v = cfg.sigma()[0].clone();
        let w = sigma_factor_unit(&cfg, &layer, &v, 6, 6).unwrap();
        assert!(w.verified);
        let w = sigma_factor_unit(&cfg, &layer, &v, 6, 1).unwrap();
        assert_eq!(w.inverse, vec![GroupRing::new(ZMod::new(3, 6), layer.group().clone()).one()]);
        assert!(sigma_factor_unit(&cfg, &layer, cfg.prime(), 6, 6).is_err());
    }

    #[test]
    fn degree_below_bound_rejected() {
        let cfg = flagship_q3();
        assert!(matches!(theta(&cfg, 1, Some(0)), Err(Error::InvalidArgument(_))));
    }
}
