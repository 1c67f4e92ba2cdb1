//! Galois groups of the real ray-class tower L_n = H_{𝔣𝔭^{n+1}} over k = F_q(θ),
//! realized as G_n = (A/𝔣𝔭^{n+1})^×/F_q^× with Frobenius, local and projection data.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::{factor, unit_group_with_budget, FinitePlace, Fq, FqField, FqPoly, Place, ResidueRing, UnitGroup, DEFAULT_UNIT_BUDGET};
use crate::groups::{AbelianGroup, GroupHom, Subgroup};
use crate::numtheory::{crt, split_p_part};

/// Conductor 𝔣, tower prime 𝔭 and the place sets S, Σ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerConfig {
    field: Arc<FqField>,
    conductor: FqPoly,
    prime: FinitePlace,
    s: Vec<Place>,
    sigma: Vec<FinitePlace>,
    unit_budget: u64,
}

#[derive(Serialize)]
struct TowerConfigJson {
    q: String,
    f: String,
    p: String,
    #[serde(rename = "S")]
    s: Vec<String>,
    #[serde(rename = "Sigma")]
    sigma: Vec<String>,
}

impl Serialize for TowerConfig {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        TowerConfigJson {
            q: self.field.tag(),
            f: self.conductor.to_text(),
            p: self.prime.gen().to_text(),
            s: self.s.iter().map(Place::label).collect(),
            sigma: self.sigma.iter().map(|v| v.gen().to_text()).collect(),
        }
        .serialize(ser)
    }
}

impl TowerConfig {
    /// `s = None` selects the default S = {𝔭} ∪ {v | 𝔣}.
    pub fn new(conductor: &FqPoly, prime: &FinitePlace, s: Option<Vec<Place>>, sigma: Vec<FinitePlace>) -> Result<TowerConfig> {
        let field = conductor.field().clone();
        prime.gen().same_field(conductor)?;
        if !conductor.is_monic() {
            return Err(Error::NotMonic(format!("conductor {conductor}")));
        }
        if !conductor.gcd(prime.gen()).is_one() {
            return Err(Error::InvalidArgument(format!("𝔭 = {prime} divides the conductor {conductor}")));
        }
        let mut required = vec![Place::Finite(prime.clone())];
        if conductor.deg() > 0 {
            for (g, _) in factor(conductor)? {
                required.push(Place::Finite(FinitePlace::new(g)?));
            }
        }
        let mut s = s.unwrap_or_else(|| required.clone());
        s.sort();
        s.dedup();
        for v in &required {
            if !s.contains(v) {
                return Err(Error::InvalidArgument(format!("S must contain the ramified place {v}")));
            }
        }
        let mut sigma = sigma;
        sigma.sort();
        sigma.dedup();
        if sigma.is_empty() {
            return Err(Error::InvalidArgument("Σ must be nonempty".into()));
        }
        for v in &sigma {
            v.gen().same_field(conductor)?;
            if s.contains(&Place::Finite(v.clone())) {
                return Err(Error::InvalidArgument(format!("Σ and S share the place {v}")));
            }
        }
        for v in s.iter().filter_map(Place::finite) {
            v.gen().same_field(conductor)?;
        }
        Ok(TowerConfig { field, conductor: conductor.clone(), prime: prime.clone(), s, sigma, unit_budget: DEFAULT_UNIT_BUDGET })
    }

    pub fn with_unit_budget(mut self, budget: u64) -> TowerConfig {
        self.unit_budget = budget;
        self
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn conductor(&self) -> &FqPoly {
        &self.conductor
    }

    pub fn prime(&self) -> &FinitePlace {
        &self.prime
    }

    pub fn s(&self) -> &[Place] {
        &self.s
    }

    pub fn sigma(&self) -> &[FinitePlace] {
        &self.sigma
    }

    pub fn unit_budget(&self) -> u64 {
        self.unit_budget
    }

    pub fn infinity_in_s(&self) -> bool {
        self.s.contains(&Place::Infinity)
    }

    pub fn in_s(&self, v: &Place) -> bool {
        self.s.contains(v)
    }

    /// 𝔣𝔭^{n+1}.
    pub fn modulus(&self, n: usize) -> FqPoly {
        &self.conductor * &self.prime.gen().pow(n as u64 + 1)
    }

    /// Same tower with a different Σ.
    pub fn with_sigma(&self, sigma: Vec<FinitePlace>) -> Result<TowerConfig> {
        TowerConfig::new(&self.conductor, &self.prime, Some(self.s.clone()), sigma).map(|c| c.with_unit_budget(self.unit_budget))
    }

    pub fn hypotheses(&self) -> Result<Hypotheses> {
        let p = self.field.p() as usize;
        let generates = if self.conductor.deg() == 0 {
            true
        } else {
            let base = GaloisLayer::for_modulus(&self.conductor, 0, self.unit_budget)?;
            let frob = base.frobenius(&Place::Finite(self.prime.clone()))?;
            base.group().span(&[frob]).order() == base.group().order()
        };
        Ok(Hypotheses {
            conductor_trivial: self.conductor.deg() == 0,
            prime_inert_in_hilbert_class_field: true,
            prime_generates_conductor_group: generates,
            class_field_degree_prime_to_p: true,
            prime_degree_prime_to_p: self.prime.degree() % p != 0,
            s_is_tower_prime_only: self.s == vec![Place::Finite(self.prime.clone())],
        })
    }
}

/// Which standing hypotheses of the finite-layer identities hold for a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Hypotheses {
    pub conductor_trivial: bool,
    /// Automatic over F_q(θ), where the Hilbert class field is k itself.
    pub prime_inert_in_hilbert_class_field: bool,
    /// Finite-layer analogue when 𝔣 ≠ 1: Frob(𝔭) generates (A/𝔣)^×/F_q^×.
    pub prime_generates_conductor_group: bool,
    /// p ∤ h_k·d_∞ = 1.
    pub class_field_degree_prime_to_p: bool,
    pub prime_degree_prime_to_p: bool,
    pub s_is_tower_prime_only: bool,
}

impl Hypotheses {
    /// Hypotheses needed for the full finite-layer identity.
    pub fn all_hold(&self) -> bool {
        self.conductor_trivial
            && self.prime_inert_in_hilbert_class_field
            && self.class_field_degree_prime_to_p
            && self.prime_degree_prime_to_p
    }

    /// Hypotheses needed for the ♯-variant.
    pub fn sharp_hold(&self) -> bool {
        self.conductor_trivial && self.prime_inert_in_hilbert_class_field
    }
}

/// G = (A/𝔪)^×/F_q^× with coordinates ordered Δ (prime-to-p factors) first, then P.
#[derive(Clone, Debug)]
pub struct GaloisLayer {
    n: usize,
    field: Arc<FqField>,
    modulus: Option<FqPoly>,
    units: Option<Arc<UnitGroup>>,
    group: AbelianGroup,
    unit_map: Vec<Vec<i128>>,
    delta_rank: usize,
    generator_reps: Vec<FqPoly>,
}

/// Decomposition and inertia subgroups of a place, by generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalData {
    pub place: Place,
    pub decomposition: Vec<Vec<u64>>,
    pub inertia: Vec<Vec<u64>>,
}

impl GaloisLayer {
    /// The layer of the trivial extension k/k.
    pub fn trivial(field: &Arc<FqField>) -> GaloisLayer {
        GaloisLayer {
            n: 0,
            field: field.clone(),
            modulus: None,
            units: None,
            group: AbelianGroup::trivial(),
            unit_map: vec![],
            delta_rank: 0,
            generator_reps: vec![],
        }
    }

    /// (A/𝔪)^×/F_q^× for an arbitrary monic modulus; `n` is a label.
    pub fn for_modulus(modulus: &FqPoly, n: usize, budget: u64) -> Result<GaloisLayer> {
        let field = modulus.field().clone();
        if modulus.deg() == 0 {
            let mut t = GaloisLayer::trivial(&field);
            t.n = n;
            return Ok(t);
        }
        let ring = ResidueRing::new(modulus)?;
        let units = unit_group_with_budget(&ring, budget)?;
        let ug = units.group().clone();
        let constants = units.dlog(&FqPoly::constant(&field, field.primitive_element()))?;
        let (quot, qmap, sections) = ug.quotient_with_sections(&[constants]);

        let p = field.p() as u64;
        let mut delta_cols = Vec::new();
        let mut p_cols = Vec::new();
        for (j, &o) in quot.orders().iter().enumerate() {
            let (pp, m) = split_p_part(o, p);
            if m > 1 {
                delta_cols.push((j, m, crt(1, m, 0, pp)));
            }
            if pp > 1 {
                p_cols.push((j, pp, crt(0, m, 1, pp)));
            }
        }
        let cols: Vec<(usize, u64, u64)> = delta_cols.iter().chain(&p_cols).copied().collect();
        let group = AbelianGroup::new(cols.iter().map(|c| c.1).collect());
        let unit_map: Vec<Vec<i128>> = qmap.iter().map(|row| cols.iter().map(|&(j, _, _)| row[j]).collect()).collect();
        let generator_reps = cols
            .iter()
            .map(|&(j, _, c)| {
                let v: Vec<i128> = sections[j].iter().map(|&x| x * c as i128).collect();
                units.element(&ug.reduce(&v))
            })
            .collect();
        let layer = GaloisLayer {
            n,
            field,
            modulus: Some(modulus.clone()),
            units: Some(Arc::new(units)),
            group,
            unit_map,
            delta_rank: delta_cols.len(),
            generator_reps,
        };
        for (i, g) in layer.generator_reps.iter().enumerate() {
            let img = layer.image_of_unit(g)?;
            if img.iter().enumerate().any(|(j, &x)| x != u64::from(i == j)) {
                return Err(Error::Consistency(format!("generator representative {i} maps to {img:?}")));
            }
        }
        Ok(layer)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Arc<FqField> {
        &self.field
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn modulus(&self) -> Option<&FqPoly> {
        self.modulus.as_ref()
    }

    pub fn order(&self) -> u64 {
        self.group.order()
    }

    /// Number of leading coordinates spanning Δ.
    pub fn delta_rank(&self) -> usize {
        self.delta_rank
    }

    pub fn delta_order(&self) -> u64 {
        self.group.orders()[..self.delta_rank].iter().product()
    }

    pub fn p_order(&self) -> u64 {
        self.group.orders()[self.delta_rank..].iter().product()
    }

    /// Residues mod 𝔪 representing the generators.
    pub fn generator_reps(&self) -> &[FqPoly] {
        &self.generator_reps
    }

    /// Class in G of a residue prime to 𝔪.
    pub fn image_of_unit(&self, a: &FqPoly) -> Result<Vec<u64>> {
        match &self.units {
            None => Ok(vec![]),
            Some(units) => {
                let x: Vec<i128> = units.dlog(a)?.into_iter().map(|c| c as i128).collect();
                if self.unit_map.is_empty() {
                    return Ok(self.group.identity());
                }
                Ok(self.group.reduce(&crate::snf::vec_mat(&x, &self.unit_map)))
            }
        }
    }

    /// Arithmetic Frobenius of an unramified place; v_∞ maps to the identity.
    pub fn frobenius(&self, v: &Place) -> Result<Vec<u64>> {
        match v {
            Place::Infinity => Ok(self.group.identity()),
            Place::Finite(w) => {
                if let Some(m) = &self.modulus {
                    if w.gen().divides(m) {
                        return Err(Error::Ramified(w.to_string()));
                    }
                }
                self.image_of_unit(w.gen())
            }
        }
    }

    /// Split into (Δ-component, P-component), both as elements of G.
    pub fn split(&self, x: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let r = self.delta_rank;
        let delta = x.iter().enumerate().map(|(i, &a)| if i < r { a } else { 0 }).collect();
        let pp = x.iter().enumerate().map(|(i, &a)| if i >= r { a } else { 0 }).collect();
        (delta, pp)
    }

    /// Δ as an abstract group and P as an abstract group.
    pub fn delta_group(&self) -> AbelianGroup {
        AbelianGroup::new(self.group.orders()[..self.delta_rank].to_vec())
    }

    pub fn p_group(&self) -> AbelianGroup {
        AbelianGroup::new(self.group.orders()[self.delta_rank..].to_vec())
    }

    /// G ↠ P = Gal(L^Δ/k).
    pub fn p_projection(&self) -> GroupHom {
        let target = self.p_group();
        let r = self.delta_rank;
        let m: Vec<Vec<i128>> = (0..self.group.rank()).map(|i| (0..target.rank()).map(|j| i128::from(i == j + r)).collect()).collect();
        GroupHom::from_matrix(&self.group, &target, &m)
    }

    /// G ↠ Δ.
    pub fn delta_projection(&self) -> GroupHom {
        let target = self.delta_group();
        let m: Vec<Vec<i128>> = (0..self.group.rank()).map(|i| (0..target.rank()).map(|j| i128::from(i == j)).collect()).collect();
        GroupHom::from_matrix(&self.group, &target, &m)
    }

    /// Exponent of `q_place` in the modulus.
    pub fn exponent_of(&self, q_place: &FinitePlace) -> usize {
        let Some(m) = &self.modulus else { return 0 };
        let mut a = 0;
        let mut r = m.clone();
        while let Ok(next) = r.exact_div(q_place.gen()) {
            r = next;
            a += 1;
        }
        a
    }

    /// Image of the unit which is `x` modulo Q^a and 1 modulo 𝔪/Q^a.
    fn embed_local(&self, q_place: &FinitePlace, a: usize, x: &FqPoly) -> Result<Vec<u64>> {
        let m = self.modulus.as_ref().expect("nontrivial layer");
        let qa = q_place.gen().pow(a as u64);
        let rest = m.exact_div(&qa)?;
        let y = if rest.deg() == 0 { x.rem(&qa) } else { ResidueRing::crt(x, &qa, &FqPoly::one(&self.field), &rest)? };
        self.image_of_unit(&y)
    }

    /// Decomposition and inertia groups of a place (of k) in this layer.
    pub fn local_data(&self, v: &Place) -> Result<LocalData> {
        let empty = LocalData { place: v.clone(), decomposition: vec![], inertia: vec![] };
        let w = match v {
            Place::Infinity => return Ok(empty),
            Place::Finite(w) => w,
        };
        if self.modulus.is_none() {
            return Ok(empty);
        }
        let a = self.exponent_of(w);
        if a == 0 {
            return Ok(LocalData { place: v.clone(), decomposition: vec![self.frobenius(v)?], inertia: vec![] });
        }
        let m = self.modulus.as_ref().expect("checked");
        let qa = w.gen().pow(a as u64);
        let local_units = unit_group_with_budget(&ResidueRing::new(&qa)?, DEFAULT_UNIT_BUDGET)?;
        let inertia: Vec<Vec<u64>> = local_units.generators().iter().map(|g| self.embed_local(w, a, g)).collect::<Result<_>>()?;
        let mut decomposition = inertia.clone();
        let rest = m.exact_div(&qa)?;
        if rest.deg() > 0 {
            let y = ResidueRing::crt(&FqPoly::one(&self.field), &qa, w.gen(), &rest)?;
            decomposition.push(self.image_of_unit(&y)?);
        }
        Ok(LocalData { place: v.clone(), decomposition, inertia })
    }

    pub fn decomposition_subgroup(&self, v: &Place) -> Result<Subgroup> {
        Ok(self.group.span(&self.local_data(v)?.decomposition))
    }

    pub fn inertia_subgroup(&self, v: &Place) -> Result<Subgroup> {
        Ok(self.group.span(&self.local_data(v)?.inertia))
    }

    /// Generators of the images of the higher unit groups at Q: entry e is U^{(e)},
    /// for e = 0..=a where Q^a ∥ 𝔪 (entry a is trivial).
    pub fn unit_filtration(&self, q_place: &FinitePlace) -> Result<Vec<Vec<Vec<u64>>>> {
        let a = self.exponent_of(q_place);
        if a == 0 {
            return Ok(vec![vec![]]);
        }
        let mut out = vec![self.local_data(&Place::Finite(q_place.clone()))?.inertia];
        let f = &self.field;
        let basis: Vec<Fq> = (0..f.e()).map(|k| Fq(f.p().pow(k))).collect();
        for level in 1..=a {
            let mut gens = Vec::new();
            for j in level..a {
                let qj = q_place.gen().pow(j as u64);
                for i in 0..q_place.degree() {
                    for &c in &basis {
                        let x = &FqPoly::one(f) + &(&FqPoly::monomial(f, c, i) * &qj);
                        gens.push(self.embed_local(q_place, a, &x)?);
                    }
                }
            }
            out.push(gens);
        }
        Ok(out)
    }

    /// JSON dump: structure, generators and Frobenius of all unramified places up to `max_degree`.
    pub fn dump(&self, max_degree: usize) -> Result<LayerDump> {
        let mut frobenius = BTreeMap::new();
        frobenius.insert("inf".to_string(), self.group.identity());
        for d in 1..=max_degree {
            for v in crate::ffpoly::irreducibles_of_degree(&self.field, d)? {
                if self.modulus.as_ref().is_some_and(|m| v.gen().divides(m)) {
                    continue;
                }
                frobenius.insert(v.gen().to_text(), self.frobenius(&Place::Finite(v))?);
            }
        }
        Ok(LayerDump {
            n: self.n,
            q: self.field.tag(),
            modulus: self.modulus.as_ref().map(|m| m.to_text()),
            order: self.order(),
            orders: self.group.orders().to_vec(),
            delta_orders: self.delta_group().orders().to_vec(),
            p_orders: self.p_group().orders().to_vec(),
            generators: self.generator_reps.iter().map(|g| g.to_text()).collect(),
            frobenius,
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerDump {
    pub n: usize,
    pub q: String,
    pub modulus: Option<String>,
    pub order: u64,
    pub orders: Vec<u64>,
    pub delta_orders: Vec<u64>,
    pub p_orders: Vec<u64>,
    pub generators: Vec<String>,
    pub frobenius: BTreeMap<String, Vec<u64>>,
}

/// G_n for the configuration.
pub fn build_layer(cfg: &TowerConfig, n: usize) -> Result<GaloisLayer> {
    GaloisLayer::for_modulus(&cfg.modulus(n), n, cfg.unit_budget)
}

/// Restriction Gal(L_m/k) ↠ Gal(L_n/k).
#[derive(Clone, Debug, Serialize)]
pub struct LayerMap {
    pub source_n: usize,
    pub target_n: usize,
    pub hom: GroupHom,
}

impl LayerMap {
    pub fn apply(&self, x: &[u64]) -> Vec<u64> {
        self.hom.apply(x)
    }

    pub fn apply_idx(&self, i: usize) -> usize {
        self.hom.apply_idx(i)
    }
}

/// Restriction map between layers whose moduli divide each other (or onto the trivial layer).
pub fn layer_projection(src: &GaloisLayer, tgt: &GaloisLayer) -> Result<LayerMap> {
    if let (Some(ms), Some(mt)) = (&src.modulus, &tgt.modulus) {
        if !mt.divides(ms) {
            return Err(Error::InvalidArgument(format!("target modulus {mt} does not divide source modulus {ms}")));
        }
    } else if tgt.modulus.is_some() {
        return Err(Error::InvalidArgument("cannot project the trivial layer onto a nontrivial one".into()));
    }
    let images = src.generator_reps.iter().map(|g| tgt.image_of_unit(g)).collect::<Result<Vec<_>>>()?;
    let hom = GroupHom { source: src.group.clone(), target: tgt.group.clone(), images };
    if !hom.is_well_defined() || !hom.is_surjective() {
        return Err(Error::Consistency("layer projection is not a surjective homomorphism".into()));
    }
    Ok(LayerMap { source_n: src.n, target_n: tgt.n, hom })
}

/// Decomposition group of v in Gal(L_m/L_n), with the explicit generator x_v when v | 𝔣.
#[derive(Clone, Debug, Serialize)]
pub struct RelativeDecomposition {
    pub place: Place,
    pub base_n: usize,
    pub top_n: usize,
    /// Element indices of D_v(L_m/k) ∩ Gal(L_m/L_n).
    #[serde(skip)]
    pub subgroup: Subgroup,
    pub order: u64,
    /// x_v = c·Q^t ≡ 1 modulo (𝔣/Q^a)·𝔭^{n+1}, for v = (Q) dividing 𝔣.
    pub x_v: Option<String>,
    pub x_v_image: Option<Vec<u64>>,
    /// Whether ⟨x_v⟩ is the whole relative decomposition group.
    pub generated_by_x_v: Option<bool>,
}

pub fn decomposition_group(cfg: &TowerConfig, base: &GaloisLayer, top: &GaloisLayer, v: &Place) -> Result<RelativeDecomposition> {
    if !cfg.in_s(v) {
        return Err(Error::InvalidArgument(format!("{v} is not in S")));
    }
    let proj = layer_projection(top, base)?;
    let kernel = proj.hom.kernel();
    let subgroup = top.decomposition_subgroup(v)?.intersect(&kernel);
    let mut out = RelativeDecomposition {
        place: v.clone(),
        base_n: base.n,
        top_n: top.n,
        order: subgroup.order(),
        subgroup,
        x_v: None,
        x_v_image: None,
        generated_by_x_v: None,
    };
    let Place::Finite(w) = v else { return Ok(out) };
    let a = top.exponent_of(w);
    if a == 0 || w == cfg.prime() {
        return Ok(out);
    }
    // v | 𝔣: find the least t with Q^t constant modulo (𝔣/Q^a)𝔭^{n+1}.
    let field = cfg.field();
    let qa = w.gen().pow(a as u64);
    let f_rest = cfg.conductor().exact_div(&qa)?;
    let base_rest = &f_rest * &cfg.prime().gen().pow(base.n as u64 + 1);
    let ring = ResidueRing::new(&base_rest)?;
    let bound = ring.unit_count()?;
    let mut power = FqPoly::one(field);
    let mut found = None;
    for t in 1..=bound {
        power = ring.mul(&power, w.gen());
        if power.is_constant() {
            found = Some((t, power.coeff(0)));
            break;
        }
    }
    let (t, c) = found.ok_or_else(|| Error::Consistency(format!("no power of {w} is constant mod {base_rest}")))?;
    let c_inv = field.inv(c).expect("unit constant");
    let x_v = w.gen().pow(t).scale(c_inv);
    let top_rest = &f_rest * &cfg.prime().gen().pow(top.n as u64 + 1);
    let global = ResidueRing::crt(&FqPoly::one(field), &qa, &x_v.rem(&top_rest), &top_rest)?;
    let img = top.image_of_unit(&global)?;
    let span = top.group().span(std::slice::from_ref(&img));
    out.generated_by_x_v = Some(span == out.subgroup);
    out.x_v = Some(x_v.to_text());
    out.x_v_image = Some(img);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::irreducibles_of_degree;

    fn poly(f: &Arc<FqField>, c: &[u32]) -> FqPoly {
        FqPoly::from_codes(f, c).unwrap()
    }

    fn place(f: &Arc<FqField>, c: &[u32]) -> FinitePlace {
        FinitePlace::new(poly(f, c)).unwrap()
    }

    fn flagship_q3() -> TowerConfig {
        let f = FqField::prime(3).unwrap();
        TowerConfig::new(&FqPoly::one(&f), &place(&f, &[1, 0, 1]), None, vec![place(&f, &[0, 1])]).unwrap()
    }

    #[test]
    fn flagship_group_orders() {
        let cfg = flagship_q3();
        let g0 = build_layer(&cfg, 0).unwrap();
        assert_eq!(g0.group().orders(), &[4]);
        assert_eq!(g0.delta_order(), 4);
        let g1 = build_layer(&cfg, 1).unwrap();
        assert_eq!(g1.order(), 36);
        assert_eq!(g1.delta_order(), 4);
        assert_eq!(g1.p_order(), 9);
        let proj = layer_projection(&g1, &g0).unwrap();
        assert_eq!(proj.hom.kernel().order(), 9);

        let f2 = FqField::prime(2).unwrap();
        let cfg2 = TowerConfig::new(&FqPoly::one(&f2), &place(&f2, &[1, 1, 1]), None, vec![place(&f2, &[0, 1])]).unwrap();
        let h0 = build_layer(&cfg2, 0).unwrap();
        assert_eq!(h0.group().orders(), &[3]);
        let h1 = build_layer(&cfg2, 1).unwrap();
        assert_eq!(h1.order(), 12);
        assert_eq!(h1.p_order(), 4);
    }

    #[test]
    fn unit_structure_matches_exhaustive_oracle() {
        // Count elements of each order in G_1 by brute force over (A/𝔭²)^× modulo F_3^×.
        let cfg = flagship_q3();
        let g1 = build_layer(&cfg, 1).unwrap();
        let m = cfg.modulus(1);
        let ring = ResidueRing::new(&m).unwrap();
        let mut brute: BTreeMap<u64, u64> = BTreeMap::new();
        for key in 0..81u64 {
            let a = ring.from_key(key);
            if !ring.is_unit(&a) || !a.is_monic() {
                continue;
            }
            // order in the quotient: least k with a^k constant.
            let mut k = 1;
            let mut x = a.clone();
            while !x.is_constant() {
                x = ring.mul(&x, &a);
                k += 1;
            }
            *brute.entry(k).or_default() += 1;
        }
        let mut ours: BTreeMap<u64, u64> = BTreeMap::new();
        for e in g1.group().elements() {
            *ours.entry(g1.group().element_order(&e)).or_default() += 1;
        }
        assert_eq!(brute, ours);
    }

    #[test]
    fn frobenius_values() {
        let cfg = flagship_q3();
        let g0 = build_layer(&cfg, 0).unwrap();
        let f = cfg.field();
        let fr = g0.frobenius(&Place::Finite(place(f, &[0, 1]))).unwrap();
        assert_eq!(g0.group().element_order(&fr), 2);
        assert_eq!(g0.frobenius(&Place::Infinity).unwrap(), g0.group().identity());
        assert!(matches!(g0.frobenius(&Place::Finite(cfg.prime().clone())), Err(Error::Ramified(_))));
        // θ² + 2 = θ² + 1 + 1 ≡ 1 mod 𝔭: trivial class.
        assert_eq!(g0.image_of_unit(&poly(f, &[2, 0, 1])).unwrap(), g0.group().identity());
    }

    #[test]
    fn frobenius_is_multiplicative_and_compatible() {
        let cfg = flagship_q3();
        let g0 = build_layer(&cfg, 0).unwrap();
        let g1 = build_layer(&cfg, 1).unwrap();
        let proj = layer_projection(&g1, &g0).unwrap();
        let f = cfg.field();
        let mut places = Vec::new();
        for d in 1..=4 {
            for v in irreducibles_of_degree(f, d).unwrap() {
                if v != *cfg.prime() {
                    places.push(v);
                }
            }
        }
        for v in &places {
            let pv = Place::Finite(v.clone());
            assert_eq!(proj.apply(&g1.frobenius(&pv).unwrap()), g0.frobenius(&pv).unwrap());
        }
        for a in places.iter().take(8) {
            for b in places.iter().take(8) {
                let prod = a.gen() * b.gen();
                let lhs = g1.image_of_unit(&prod).unwrap();
                let rhs = g1.group().mul(&g1.image_of_unit(a.gen()).unwrap(), &g1.image_of_unit(b.gen()).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn delta_p_split_is_unique() {
        let cfg = flagship_q3();
        let g1 = build_layer(&cfg, 1).unwrap();
        let p = 3;
        for e in g1.group().elements() {
            let (d, pp) = g1.split(&e);
            assert_eq!(g1.group().mul(&d, &pp), e);
            assert!(crate::numtheory::gcd(g1.group().element_order(&d), p) == 1);
            let o = g1.group().element_order(&pp);
            assert_eq!(split_p_part(o, p).1, 1);
        }
    }

    #[test]
    fn tower_prime_decomposition_is_everything() {
        let cfg = flagship_q3();
        let g1 = build_layer(&cfg, 1).unwrap();
        let g0 = build_layer(&cfg, 0).unwrap();
        let v = Place::Finite(cfg.prime().clone());
        assert_eq!(g1.decomposition_subgroup(&v).unwrap().order(), 36);
        assert_eq!(g1.inertia_subgroup(&v).unwrap().order(), 36);
        let rel = decomposition_group(&cfg, &g0, &g1, &v).unwrap();
        assert_eq!(rel.order, 9);
        assert!(decomposition_group(&cfg, &g0, &g1, &Place::Finite(place(cfg.field(), &[0, 1]))).is_err());
    }

    #[test]
    fn conductor_place_generator() {
        // 𝔣 = θ, 𝔭 = θ²+1 over F_3: x_v = −θ², of order 3 in G_1, generating D_v ∩ ker.
        let f = FqField::prime(3).unwrap();
        let theta = place(&f, &[0, 1]);
        let cfg = TowerConfig::new(theta.gen(), &place(&f, &[1, 0, 1]), None, vec![place(&f, &[1, 1])]).unwrap();
        let g0 = build_layer(&cfg, 0).unwrap();
        let g1 = build_layer(&cfg, 1).unwrap();
        assert_eq!(g0.order(), 8);
        assert_eq!(g1.order(), 72);
        let rel = decomposition_group(&cfg, &g0, &g1, &Place::Finite(theta.clone())).unwrap();
        assert_eq!(rel.x_v.as_deref(), Some("[0,0,2]@q=3^1"));
        assert_eq!(rel.order, 3);
        assert_eq!(rel.generated_by_x_v, Some(true));
        // Inertia at θ: (A/θ)^× × 1 survives the diagonal quotient by F_3^×.
        assert_eq!(g1.inertia_subgroup(&Place::Finite(theta.clone())).unwrap().order(), 2);
        let hyp = cfg.hypotheses().unwrap();
        assert!(!hyp.conductor_trivial);
        assert!(hyp.prime_generates_conductor_group);
    }

    #[test]
    fn x_v_compatible_across_layers() {
        let f = FqField::prime(3).unwrap();
        let cond = place(&f, &[1, 1]);
        let cfg = TowerConfig::new(&cond.gen().pow(2), &place(&f, &[0, 1]), None, vec![place(&f, &[2, 1])]).unwrap();
        let layers: Vec<GaloisLayer> = (0..3).map(|n| build_layer(&cfg, n).unwrap()).collect();
        let v = Place::Finite(cond.clone());
        let r1 = decomposition_group(&cfg, &layers[0], &layers[1], &v).unwrap();
        let r2 = decomposition_group(&cfg, &layers[0], &layers[2], &v).unwrap();
        assert_eq!(r1.generated_by_x_v, Some(true));
        assert_eq!(r2.generated_by_x_v, Some(true));
        let proj = layer_projection(&layers[2], &layers[1]).unwrap();
        assert_eq!(proj.apply(r2.x_v_image.as_ref().unwrap()), *r1.x_v_image.as_ref().unwrap());
    }

    #[test]
    fn orders_match_euler_phi_and_kernel_steps() {
        for (p, e) in [(2, 1), (3, 1), (2, 2)] {
            let f = FqField::new(p, e).unwrap();
            let q = f.q() as u64;
            for pl in irreducibles_of_degree(&f, 2).unwrap().into_iter().take(2) {
                let sigma = irreducibles_of_degree(&f, 1).unwrap().remove(0);
                let cfg = TowerConfig::new(&FqPoly::one(&f), &pl, None, vec![sigma]).unwrap();
                let mut prev: Option<GaloisLayer> = None;
                for n in 0..3 {
                    let g = build_layer(&cfg, n).unwrap();
                    let phi = ResidueRing::new(&cfg.modulus(n)).unwrap().unit_count().unwrap();
                    assert_eq!(g.order(), phi / (q - 1));
                    if let Some(pr) = &prev {
                        let proj = layer_projection(&g, pr).unwrap();
                        assert_eq!(proj.hom.kernel().order(), q.pow(2));
                    }
                    prev = Some(g);
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let f = FqField::prime(3).unwrap();
        let pp = place(&f, &[1, 0, 1]);
        assert!(TowerConfig::new(&FqPoly::one(&f), &pp, None, vec![]).is_err());
        assert!(TowerConfig::new(&FqPoly::one(&f), &pp, None, vec![pp.clone()]).is_err());
        assert!(TowerConfig::new(pp.gen(), &pp, None, vec![place(&f, &[0, 1])]).is_err());
        assert!(TowerConfig::new(&poly(&f, &[0, 1]), &pp, Some(vec![Place::Finite(pp.clone())]), vec![place(&f, &[1, 1])]).is_err());
        let cfg = TowerConfig::new(&FqPoly::one(&f), &pp, Some(vec![Place::Infinity, Place::Finite(pp.clone())]), vec![place(&f, &[0, 1])])
            .unwrap();
        assert!(cfg.infinity_in_s());
        let json = serde_json::to_string(&cfg).unwrap();
        assert_eq!(json, r#"{"q":"3^1","f":"[1]@q=3^1","p":"[1,0,1]@q=3^1","S":["[1,0,1]@q=3^1","inf"],"Sigma":["[0,1]@q=3^1"]}"#);
        let hyp = flagship_q3().hypotheses().unwrap();
        assert!(hyp.all_hold() && hyp.s_is_tower_prime_only);
    }

    #[test]
    fn trivial_layer_projection() {
        let cfg = flagship_q3();
        let g1 = build_layer(&cfg, 1).unwrap();
        let t = GaloisLayer::trivial(cfg.field());
        let proj = layer_projection(&g1, &t).unwrap();
        assert_eq!(proj.hom.kernel().order(), 36);
        let id = layer_projection(&g1, &g1).unwrap();
        assert_eq!(id.hom.kernel().order(), 1);
    }

    #[test]
    fn unit_filtration_levels() {
        let cfg = flagship_q3();
        let g1 = build_layer(&cfg, 1).unwrap();
        let filt = g1.unit_filtration(cfg.prime()).unwrap();
        assert_eq!(filt.len(), 3);
        let sizes: Vec<u64> = filt.iter().map(|gens| g1.group().span(gens).order()).collect();
        assert_eq!(sizes, vec![36, 9, 1]);
    }
}
