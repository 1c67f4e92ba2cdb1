//! Multi-layer runs, the ♯ functor and coherent non-zero-divisor checks on finite projective systems.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ffpoly::irreducibles_of_degree;
use crate::geometry::{
    charpoly_comparison, count_points_model, count_points_splitting, nabla_order, s_divisors, zeta_numerator, CharpolyComparison,
    CurveModel, FixedField, NablaOrder, ZetaData, DEFAULT_POINT_BUDGET,
};
use crate::grouprings::{
    annihilator, annihilator_generators, cyclotomic_ring, divide, ideal_equal, is_unit, quotient_order_log, smith_zpk, FiniteZpk,
    GroupRing, Integers, QuotientRing, Ring, ZMod,
};
use crate::groups::{AbelianGroup, GroupHom};
use crate::lfun::{
    compare_projected, order_of_vanishing_all, sigma_factor_unit, sigma_product, stability_recheck, theta_for_layer, FunctorialityReport,
    SigmaUnitWitness, ThetaResult, VanishingReport,
};
use crate::rayclass::{build_layer, layer_projection, GaloisLayer, TowerConfig};

/// Knobs of a tower run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerOptions {
    /// Enumeration degree D; `None` means the per-layer bound plus 4.
    pub degree: Option<usize>,
    /// k in Z/p^k[G_n].
    pub precision: u32,
    /// (precision, truncation) of the Σ-factor inverse witnesses.
    pub sigma_precision: u32,
    pub sigma_truncation: usize,
    /// (precision, truncation) of the unit certificates in the characteristic-polynomial comparison.
    pub charpoly_precision: u32,
    pub charpoly_truncation: usize,
    /// Largest q^i enumerated by the plane-model point count.
    pub point_budget: u64,
    /// Number of point counts N_1..N_i compared between the two oracles.
    pub count_degree: usize,
    pub geometry: bool,
}

impl Default for TowerOptions {
    fn default() -> Self {
        TowerOptions {
            degree: None,
            precision: 24,
            sigma_precision: 6,
            sigma_truncation: 6,
            charpoly_precision: 12,
            charpoly_truncation: 12,
            point_budget: DEFAULT_POINT_BUDGET,
            count_degree: 6,
            geometry: true,
        }
    }
}

/// One certified (or refuted) claim, with the precision or bound it was checked at.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub suite: String,
    /// The statement this is the finite-layer shadow of.
    pub shadows: String,
    pub layer: Option<usize>,
    pub passed: bool,
    pub precision: Option<u32>,
    pub bound: Option<usize>,
    pub detail: String,
}

impl Verdict {
    fn new(suite: &str, shadows: &str, layer: Option<usize>, passed: bool, detail: String) -> Verdict {
        Verdict { suite: suite.into(), shadows: shadows.into(), layer, passed, precision: None, bound: None, detail }
    }

    fn at_precision(mut self, k: u32) -> Verdict {
        self.precision = Some(k);
        self
    }

    fn at_bound(mut self, d: usize) -> Verdict {
        self.bound = Some(d);
        self
    }
}

/// χ(Θ(1)) for a character with no zero at u = 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CharacterValue {
    pub character: Vec<u64>,
    pub nonzero: bool,
    /// v_p of N(χ(Θ(1))), or `None` if the norm vanishes mod p^k.
    pub norm_valuation: Option<u32>,
}

/// Finite shadows of Θ(1) being a non-zero divisor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThetaNzdCertificate {
    pub precision: u32,
    /// log_p |Ann(Θ(1))| in Z/p^k[G].
    pub annihilator_log: u32,
    /// Ann(Θ(1)) ⊆ p^{k−c}·Z/p^k[G] for this c.
    pub slack: Option<u32>,
    /// Characters nontrivial on every decomposition group of S.
    pub characters: Vec<CharacterValue>,
}

impl ThetaNzdCertificate {
    pub fn holds(&self) -> bool {
        self.characters.iter().all(|c| c.nonzero && c.norm_valuation.is_some())
    }
}

pub fn theta_nzd(cfg: &TowerConfig, layer: &GaloisLayer, theta: &ThetaResult, precision: u32) -> Result<ThetaNzdCertificate> {
    let p = cfg.field().p() as u64;
    let z = ZMod::new(p, precision);
    let gr = GroupRing::new(z, layer.group().clone());
    let ann = annihilator(&gr, &theta.special_value_mod(z));
    let decomposition: Vec<Vec<Vec<u64>>> = cfg.s().iter().map(|v| Ok(layer.local_data(v)?.decomposition)).collect::<Result<_>>()?;
    let n = layer.group().exponent();
    let exact = cyclotomic_ring(n);
    let modular = QuotientRing::new(z, exact.modulus().iter().map(|&c| z.reduce_i128(c)).collect());
    let mut characters = Vec::new();
    for c in &theta.characters {
        if decomposition.iter().any(|d| c.character.is_trivial_on(d)) {
            continue;
        }
        let value = c.poly.iter().fold(exact.zero(), |acc, a| exact.add(&acc, a));
        let nonzero = !exact.is_zero(&value);
        // The norm to Z is the product of the conjugates ζ ↦ ζ^a, a ∈ (Z/N)^×.
        let mut norm = modular.one();
        for a in (1..=n).filter(|&a| crate::numtheory::gcd(a, n) == 1) {
            let chi = c.character.power(a as i64);
            let v = theta.characters.iter().find(|d| d.character == chi).expect("powers of a character are characters");
            let value = v.poly.iter().fold(exact.zero(), |acc, a| exact.add(&acc, a));
            let reduced: Vec<u64> = value.iter().map(|&x| z.reduce_i128(x)).collect();
            norm = modular.mul(&norm, &reduced);
        }
        let scalar = norm[0];
        let norm_valuation = (norm.iter().skip(1).all(|&x| x == 0) && scalar != 0).then(|| z.valuation(scalar));
        characters.push(CharacterValue { character: c.character.values.clone(), nonzero, norm_valuation });
    }
    Ok(ThetaNzdCertificate { precision, annihilator_log: ann.order_log, slack: ann.slack, characters })
}

/// |Z/p^k[G_n]/(Θ(1))| against the p-order of ∇_S from the class number.
#[derive(Clone, Debug, Serialize)]
pub struct MainConjectureShadow {
    pub precision: u32,
    /// log_p |Z/p^k[G]/(Θ(1))|.
    pub theta_quotient_log: u32,
    pub nabla: NablaOrder,
    pub agrees: bool,
}

pub fn main_conjecture_shadow(
    cfg: &TowerConfig,
    layer: &GaloisLayer,
    theta: &ThetaResult,
    zeta: &ZetaData,
    precision: u32,
) -> Result<MainConjectureShadow> {
    let ff = FixedField::full(layer);
    let sdiv = s_divisors(cfg, &ff)?;
    let nabla = nabla_order(cfg, layer, zeta, &sdiv, None)?;
    let z = ZMod::new(cfg.field().p() as u64, precision);
    let gr = GroupRing::new(z, layer.group().clone());
    let theta_quotient_log = quotient_order_log(&gr, &[theta.special_value_mod(z)]);
    Ok(MainConjectureShadow { precision, theta_quotient_log, agrees: theta_quotient_log == nabla.p_order_log, nabla })
}

/// Θ_{S,Σ} against Θ_{S,Σ'}: Θ_{S,Σ}·δ_{Σ'} = Θ_{S,Σ'}·δ_Σ in Z[G][u], δ the Σ-products.
#[derive(Clone, Debug, Serialize)]
pub struct SigmaIndependence {
    pub precision: u32,
    pub sigma: Vec<String>,
    pub alternative: Vec<String>,
    pub identity_exact: bool,
    /// δ_Σ(1) and δ_{Σ'}(1) are units of Z/p^k[G].
    pub units_certified: bool,
    pub ideals_equal: bool,
    pub quotient_log: u32,
    pub alternative_quotient_log: u32,
}

impl SigmaIndependence {
    pub fn holds(&self) -> bool {
        self.identity_exact && self.units_certified && self.ideals_equal && self.quotient_log == self.alternative_quotient_log
    }
}

fn group_poly_mul(gr: &GroupRing<Integers>, a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let mut out = vec![gr.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = gr.add(&out[i + j], &gr.mul(x, y));
        }
    }
    while out.len() > 1 && out.last().is_some_and(|c| gr.is_zero(c)) {
        out.pop();
    }
    out
}

pub fn sigma_independence(
    cfg: &TowerConfig,
    alternative: &TowerConfig,
    layer: &GaloisLayer,
    theta: &ThetaResult,
    precision: u32,
) -> Result<SigmaIndependence> {
    let alt_theta = theta_for_layer(alternative, layer, None)?;
    let gr = GroupRing::new(Integers, layer.group().clone());
    let delta = sigma_product(cfg, layer)?;
    let alt_delta = sigma_product(alternative, layer)?;
    let identity_exact = group_poly_mul(&gr, &theta.theta.coeffs, &alt_delta) == group_poly_mul(&gr, &alt_theta.theta.coeffs, &delta);
    let z = ZMod::new(cfg.field().p() as u64, precision);
    let gz = GroupRing::new(z, layer.group().clone());
    let at_one = |d: &[Vec<i128>]| -> Vec<u64> {
        let sum = d.iter().fold(gr.zero(), |acc, c| gr.add(&acc, c));
        sum.iter().map(|&c| z.reduce_i128(c)).collect()
    };
    let units_certified = is_unit(&gz, &at_one(&delta)).is_some() && is_unit(&gz, &at_one(&alt_delta)).is_some();
    let a = theta.special_value_mod(z);
    let b = alt_theta.special_value_mod(z);
    Ok(SigmaIndependence {
        precision,
        sigma: cfg.sigma().iter().map(|v| v.gen().to_text()).collect(),
        alternative: alternative.sigma().iter().map(|v| v.gen().to_text()).collect(),
        identity_exact,
        units_certified,
        ideals_equal: ideal_equal(&gz, std::slice::from_ref(&a), std::slice::from_ref(&b)),
        quotient_log: quotient_order_log(&gz, &[a]),
        alternative_quotient_log: quotient_order_log(&gz, &[b]),
    })
}

/// The same configuration with Σ replaced by the first other admissible place of degree ≤ 3.
pub fn alternative_sigma(cfg: &TowerConfig) -> Result<Option<TowerConfig>> {
    for d in 1..=3 {
        for w in irreducibles_of_degree(cfg.field(), d)? {
            if cfg.sigma().contains(&w) {
                continue;
            }
            if let Ok(alt) = cfg.with_sigma(vec![w]) {
                return Ok(Some(alt));
            }
        }
    }
    Ok(None)
}

/// Point counts from both oracles and the zeta data they determine.
#[derive(Clone, Debug, Serialize)]
pub struct GeometryRun {
    pub layer: usize,
    pub counts_model: Vec<u64>,
    pub counts_splitting: Vec<u64>,
    pub zeta: ZetaData,
    pub main_conjecture: Option<MainConjectureShadow>,
    /// Why the main-conjecture shadow was skipped.
    pub main_conjecture_skipped: Option<String>,
    pub sigma_independence: Option<SigmaIndependence>,
    pub charpoly: Option<CharpolyComparison>,
}

fn geometry_run(cfg: &TowerConfig, layer: &GaloisLayer, theta: &ThetaResult, options: &TowerOptions) -> Result<GeometryRun> {
    let q = cfg.field().q() as u64;
    let ff = FixedField::full(layer);
    let genus = ff.genus_from_conductors()? as usize;
    let reachable = (1..=options.count_degree).take_while(|&i| q.checked_pow(i as u32).is_some_and(|s| s <= options.point_budget)).count();
    let model = CurveModel::for_layer(layer)?;
    let counts_model = (1..=reachable).map(|i| count_points_model(&model, i, options.point_budget)).collect::<Result<Vec<u64>>>()?;
    let m = reachable.max(2 * genus + 2);
    let counts_splitting = (1..=m).map(|i| count_points_splitting(&ff, i, options.point_budget)).collect::<Result<Vec<u64>>>()?;
    let mut zeta = zeta_numerator(&counts_splitting, q)?;
    zeta.genus_from_conductors = Some(genus as u64);
    let (main_conjecture, main_conjecture_skipped) = match main_conjecture_shadow(cfg, layer, theta, &zeta, options.precision) {
        Ok(s) => (Some(s), None),
        Err(Error::Unsupported(why)) => (None, Some(why)),
        Err(e) => return Err(e),
    };
    let charpoly =
        match charpoly_comparison(cfg, layer, theta, options.charpoly_precision, options.charpoly_truncation, options.point_budget) {
            Ok(c) => Some(c),
            Err(Error::Unsupported(_)) => None,
            Err(e) => return Err(e),
        };
    let sigma_independence = match alternative_sigma(cfg)? {
        Some(alt) => Some(sigma_independence(cfg, &alt, layer, theta, options.precision)?),
        None => None,
    };
    Ok(GeometryRun {
        layer: layer.n(),
        counts_model,
        counts_splitting,
        zeta,
        main_conjecture,
        main_conjecture_skipped,
        sigma_independence,
        charpoly,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LayerRun {
    pub n: usize,
    pub orders: Vec<u64>,
    pub theta: ThetaResult,
    pub stable_at_degree_plus_two: bool,
    pub vanishing: Vec<VanishingReport>,
    pub sigma_units: Vec<SigmaUnitWitness>,
    pub nzd: ThetaNzdCertificate,
}

/// Layers 0..N of a tower with every verification suite, as a coherent family of finite-layer data.
#[derive(Clone, Debug, Serialize)]
pub struct TowerRun {
    pub config: TowerConfig,
    pub options: TowerOptions,
    pub layers: Vec<LayerRun>,
    pub functoriality: Vec<FunctorialityReport>,
    pub geometry: Option<GeometryRun>,
    pub verdicts: Vec<Verdict>,
}

impl TowerRun {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    /// One line per verdict.
    pub fn summary_table(&self) -> String {
        let mut out = format!("{:<16} {:>5} {:>6} {:>6}  {}\n", "suite", "layer", "prec", "result", "detail");
        for v in &self.verdicts {
            let layer = v.layer.map_or("-".to_string(), |n| n.to_string());
            let prec = match (v.precision, v.bound) {
                (Some(k), _) => format!("p^{k}"),
                (None, Some(d)) => format!("D={d}"),
                _ => "exact".into(),
            };
            out += &format!("{:<16} {:>5} {:>6} {:>6}  {}\n", v.suite, layer, prec, if v.passed { "PASS" } else { "FAIL" }, v.detail);
        }
        out
    }
}

fn layer_run(cfg: &TowerConfig, layer: &GaloisLayer, options: &TowerOptions) -> Result<LayerRun> {
    let theta = theta_for_layer(cfg, layer, options.degree)?;
    let stable = stability_recheck(cfg, layer, &theta)?;
    let vanishing = order_of_vanishing_all(cfg, layer, &theta)?;
    let sigma_units = cfg
        .sigma()
        .iter()
        .map(|w| sigma_factor_unit(cfg, layer, w, options.sigma_precision, options.sigma_truncation))
        .collect::<Result<Vec<_>>>()?;
    let nzd = theta_nzd(cfg, layer, &theta, options.precision)?;
    Ok(LayerRun {
        n: layer.n(),
        orders: layer.group().orders().to_vec(),
        theta,
        stable_at_degree_plus_two: stable,
        vanishing,
        sigma_units,
        nzd,
    })
}

fn layer_verdicts(run: &LayerRun, options: &TowerOptions) -> Vec<Verdict> {
    let n = Some(run.n);
    let cert = &run.theta.certificate;
    let consistent = run.theta.characters.iter().all(|c| c.consistent);
    let mut out = vec![Verdict::new(
        "stabilization",
        "Θ is a polynomial in u",
        n,
        cert.window_vanishes && cert.per_character_window_vanishes && consistent && run.stable_at_degree_plus_two,
        format!("bound {}, zero window up to {}, identical at D+2: {}", cert.bound, cert.enumeration_degree, run.stable_at_degree_plus_two),
    )
    .at_bound(cert.enumeration_degree)];
    let agree = run.vanishing.iter().filter(|v| v.agrees()).count();
    out.push(Verdict::new(
        "ordvan",
        "order of vanishing at u = 1",
        n,
        agree == run.vanishing.len(),
        format!("{agree}/{} nontrivial characters", run.vanishing.len()),
    ));
    for w in &run.sigma_units {
        out.push(
            Verdict::new(
                "sigmaunit",
                "Σ-factors are units when p | q",
                n,
                w.verified,
                format!("place {} inverted mod u^{}", w.place, w.truncation),
            )
            .at_precision(w.precision),
        );
    }
    let nzd = &run.nzd;
    out.push(
        Verdict::new(
            "nzd",
            "Θ(1) is a non-zero divisor",
            n,
            nzd.holds(),
            format!(
                "{} characters with χ(Θ(1)) ≠ 0; |Ann| = p^{}, slack {}",
                nzd.characters.len(),
                nzd.annihilator_log,
                nzd.slack.map_or("none".into(), |c| c.to_string())
            ),
        )
        .at_precision(options.precision),
    );
    out
}

fn geometry_verdicts(g: &GeometryRun, options: &TowerOptions) -> Vec<Verdict> {
    let n = Some(g.layer);
    let prefix_equal = g.counts_model[..] == g.counts_splitting[..g.counts_model.len()];
    let z = &g.zeta;
    let mut out = vec![
        Verdict::new(
            "points",
            "two point-count oracles agree",
            n,
            prefix_equal,
            format!("N_1..N_{} = {:?}", g.counts_model.len(), g.counts_model),
        ),
        Verdict::new(
            "zeta",
            "rationality, functional equation and Riemann hypothesis",
            n,
            z.functional_equation_holds()
                && z.weil_bounds_hold()
                && z.riemann_hypothesis_holds()
                && z.genus_from_conductors == Some(z.genus as u64),
            format!("genus {}, h = {}, P = {:?}", z.genus, z.h, z.numerator),
        ),
    ];
    match (&g.main_conjecture, &g.main_conjecture_skipped) {
        (Some(s), _) => out.push(
            Verdict::new(
                "cnf",
                "Fitting ideal of the Tate module is generated by Θ(1)",
                n,
                s.agrees,
                format!("|Z_p[G]/Θ(1)| = p^{}, |∇_S ⊗ Z_p| = p^{}", s.theta_quotient_log, s.nabla.p_order_log),
            )
            .at_precision(options.precision),
        ),
        (None, Some(why)) => out.push(Verdict::new("cnf", "skipped", n, true, why.clone())),
        _ => {}
    }
    if let Some(s) = &g.sigma_independence {
        out.push(
            Verdict::new(
                "sigma",
                "Θ(1)·Z_p[G] does not depend on Σ",
                n,
                s.holds(),
                format!("Σ = {:?} against Σ' = {:?}: quotient p^{} both ways", s.sigma, s.alternative, s.quotient_log),
            )
            .at_precision(s.precision),
        );
    }
    if let Some(c) = &g.charpoly {
        out.push(
            Verdict::new(
                "charpoly",
                "χ(Θ) against the characteristic polynomial of Frobenius",
                n,
                c.holds(),
                format!("{} rational characters, charpoly {:?}", c.orbits.len(), c.charpoly),
            )
            .at_precision(c.precision),
        );
    }
    out
}

pub fn run_tower(cfg: &TowerConfig, top: usize, options: &TowerOptions) -> Result<TowerRun> {
    let layers: Vec<GaloisLayer> = (0..=top).into_par_iter().map(|n| build_layer(cfg, n)).collect::<Result<_>>()?;
    let runs: Vec<LayerRun> = layers.par_iter().map(|l| layer_run(cfg, l, options)).collect::<Result<_>>()?;
    let functoriality: Vec<FunctorialityReport> = (1..=top)
        .into_par_iter()
        .map(|n| Ok(compare_projected(&layer_projection(&layers[n], &layers[n - 1])?, &runs[n].theta, &runs[n - 1].theta)))
        .collect::<Result<_>>()?;
    let geometry = if options.geometry { Some(geometry_run(cfg, &layers[0], &runs[0].theta, options)?) } else { None };

    let mut verdicts = Vec::new();
    for r in &runs {
        verdicts.extend(layer_verdicts(r, options));
    }
    for f in &functoriality {
        verdicts.push(Verdict::new(
            "functoriality",
            "restriction sends Θ of L_n to Θ of L_{n−1}",
            Some(f.top_n),
            f.equal,
            f.first_mismatch.map_or(format!("projection to layer {} is exact", f.base_n), |j| format!("first mismatch at u^{j}")),
        ));
    }
    if let Some(g) = &geometry {
        verdicts.extend(geometry_verdicts(g, options));
    }
    Ok(TowerRun { config: cfg.clone(), options: options.clone(), layers: runs, functoriality, geometry, verdicts })
}

/// e_Δ = |Δ|^{-1}·Σ_{δ∈Δ} δ in Z/p^k[G], Δ the first `delta_rank` coordinates.
pub fn delta_idempotent(z: ZMod, group: &AbelianGroup, delta_rank: usize) -> Result<Vec<u64>> {
    let delta_order: u64 = group.orders()[..delta_rank].iter().product();
    let inv = z.inv(delta_order % z.modulus()).ok_or_else(|| Error::InvalidArgument(format!("p divides |Δ| = {delta_order}")))?;
    let mut e = vec![0u64; group.len()];
    for (i, slot) in e.iter_mut().enumerate() {
        if group.elem(i)[delta_rank..].iter().all(|&c| c == 0) {
            *slot = inv;
        }
    }
    Ok(e)
}

/// 1 − e_Δ.
pub fn sharp_idempotent(z: ZMod, group: &AbelianGroup, delta_rank: usize) -> Result<Vec<u64>> {
    let gr = GroupRing::new(z, group.clone());
    Ok(gr.sub(&gr.one(), &delta_idempotent(z, group, delta_rank)?))
}

/// x ↦ (1 − e_Δ)·x in Z/p^k[G].
pub fn sharp_projection(z: ZMod, group: &AbelianGroup, delta_rank: usize, x: &[u64]) -> Result<Vec<u64>> {
    let gr = GroupRing::new(z, group.clone());
    Ok(gr.mul(&sharp_idempotent(z, group, delta_rank)?, &x.to_vec()))
}

/// R^n modulo the R-span of `relations`, R = Z/p^k[G].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentedModule {
    pub ngens: usize,
    pub relations: Vec<Vec<Vec<u64>>>,
}

fn span_log(ring: &GroupRing<ZMod>, ngens: usize, vectors: &[Vec<Vec<u64>>]) -> u32 {
    let z = *ring.base();
    let width = ngens * ring.group().len();
    let mut rows = Vec::new();
    for v in vectors {
        for g in 0..ring.group().len() {
            let basis = ring.group_element(g);
            rows.push(v.iter().flat_map(|c| ring.mul(c, &basis)).collect::<Vec<u64>>());
        }
    }
    if rows.is_empty() {
        return 0;
    }
    width as u32 * z.k() - smith_zpk(z, &rows, width).cokernel_log()
}

fn unit_vectors(ring: &GroupRing<ZMod>, n: usize, scale: &[u64]) -> Vec<Vec<Vec<u64>>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { scale.to_vec() } else { ring.zero() }).collect()).collect()
}

fn scaled(ring: &GroupRing<ZMod>, e: &[u64], vectors: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
    vectors.iter().map(|v| v.iter().map(|c| ring.mul(&e.to_vec(), c)).collect()).collect()
}

fn union(a: &[Vec<Vec<u64>>], b: &[Vec<Vec<u64>>]) -> Vec<Vec<Vec<u64>>> {
    a.iter().chain(b).cloned().collect()
}

/// log_p |e·M| for a presented module M.
pub fn idempotent_image_log(ring: &GroupRing<ZMod>, e: &[u64], m: &PresentedModule) -> u32 {
    let x = union(&unit_vectors(ring, m.ngens, e), &m.relations);
    span_log(ring, m.ngens, &x) - span_log(ring, m.ngens, &m.relations)
}

/// Orders along 0 → N^♯ → M^♯ → (M/N)^♯ → 0 for N ⊆ M spanned by `sub`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SharpExactness {
    pub sub_log: u32,
    pub module_log: u32,
    pub quotient_log: u32,
    /// log_p of the kernel of M^♯ → (M/N)^♯.
    pub kernel_log: u32,
    pub exact: bool,
}

pub fn sharp_exactness(ring: &GroupRing<ZMod>, e: &[u64], m: &PresentedModule, sub: &[Vec<Vec<u64>>]) -> SharpExactness {
    let n = m.ngens;
    let u = span_log(ring, n, &m.relations);
    let x_gens = union(&unit_vectors(ring, n, e), &m.relations);
    let y_gens = union(sub, &m.relations);
    let z_gens = union(&scaled(ring, e, sub), &m.relations);
    let x = span_log(ring, n, &x_gens);
    let y = span_log(ring, n, &y_gens);
    let xy = span_log(ring, n, &union(&x_gens, &y_gens));
    let zl = span_log(ring, n, &z_gens);
    let z_in_x = span_log(ring, n, &union(&x_gens, &z_gens)) == x;
    let z_in_y = span_log(ring, n, &union(&y_gens, &z_gens)) == y;
    // |X ∩ Y| = |X|·|Y|/|X + Y|.
    let kernel_log = x + y - xy - u;
    let sub_log = zl - u;
    let module_log = x - u;
    let quotient_log = xy - y;
    SharpExactness {
        sub_log,
        module_log,
        quotient_log,
        kernel_log,
        exact: z_in_x && z_in_y && kernel_log == sub_log && module_log == sub_log + quotient_log,
    }
}

/// (Z_p/d)^♯ for Z_p/d with trivial G-action, as log_p of its order at precision k.
pub fn sharp_of_trivial_module(z: ZMod, group: &AbelianGroup, delta_rank: usize, d: u64) -> Result<(u32, u32)> {
    let ring = GroupRing::new(z, group.clone());
    let mut relations = vec![vec![ring.scalar(d % z.modulus())]];
    for i in 0..group.rank() {
        let mut g = group.identity();
        g[i] = 1;
        relations.push(vec![ring.sub(&ring.group_element(group.index(&g)), &ring.one())]);
    }
    let m = PresentedModule { ngens: 1, relations };
    let e = sharp_idempotent(z, group, delta_rank)?;
    let whole = idempotent_image_log(&ring, &ring.one(), &m);
    Ok((whole, idempotent_image_log(&ring, &e, &m)))
}

/// Rings Z/p^{k_m}[G_m] with surjections R_{m+1} → R_m and a coherent sequence α_m.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ToyProjectiveSystem {
    pub p: u64,
    pub precisions: Vec<u32>,
    pub groups: Vec<AbelianGroup>,
    /// maps[m]: G_{m+1} → G_m.
    pub maps: Vec<GroupHom>,
    pub alpha: Vec<Vec<u64>>,
}

impl ToyProjectiveSystem {
    /// Levels 0..len with the given precisions and groups; α is the image of `alpha_top`.
    pub fn from_top(p: u64, precisions: Vec<u32>, groups: Vec<AbelianGroup>, maps: Vec<GroupHom>, alpha_top: Vec<u64>) -> Result<Self> {
        let len = precisions.len();
        if len == 0 || groups.len() != len || maps.len() + 1 != len {
            return Err(Error::InvalidArgument("levels, groups and maps do not line up".into()));
        }
        let mut sys = ToyProjectiveSystem { p, precisions, groups, maps, alpha: vec![vec![]; len] };
        sys.alpha[len - 1] = alpha_top;
        for m in (0..len - 1).rev() {
            sys.alpha[m] = sys.project(m + 1, &sys.alpha[m + 1]);
        }
        sys.validate()?;
        Ok(sys)
    }

    /// R_m = Z/p^{m+offset}, α_m = a.
    pub fn integers(p: u64, len: usize, offset: u32, a: i64) -> Result<Self> {
        let precisions: Vec<u32> = (0..len as u32).map(|m| m + offset).collect();
        let groups = vec![AbelianGroup::trivial(); len];
        let maps = (1..len).map(|_| GroupHom::identity(&AbelianGroup::trivial())).collect();
        let z = ZMod::new(p, precisions[len - 1]);
        Self::from_top(p, precisions, groups, maps, vec![z.from_i64(a)])
    }

    pub fn len(&self) -> usize {
        self.precisions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.precisions.is_empty()
    }

    pub fn ring(&self, m: usize) -> GroupRing<ZMod> {
        GroupRing::new(ZMod::new(self.p, self.precisions[m]), self.groups[m].clone())
    }

    /// R_m → R_{m−1}.
    pub fn project(&self, m: usize, x: &[u64]) -> Vec<u64> {
        let target = ZMod::new(self.p, self.precisions[m - 1]);
        let map = &self.maps[m - 1];
        let mut out = vec![0u64; self.groups[m - 1].len()];
        for (i, &c) in x.iter().enumerate() {
            let j = map.apply_idx(i);
            out[j] = target.add(&out[j], &(c % target.modulus()));
        }
        out
    }

    fn project_to(&self, from: usize, to: usize, x: &[u64]) -> Vec<u64> {
        (to + 1..=from).rev().fold(x.to_vec(), |acc, m| self.project(m, &acc))
    }

    /// Transition maps are ring surjections and α is coherent.
    pub fn validate(&self) -> Result<()> {
        for m in 1..self.len() {
            let map = &self.maps[m - 1];
            if self.precisions[m] < self.precisions[m - 1]
                || map.source != self.groups[m]
                || map.target != self.groups[m - 1]
                || !map.is_well_defined()
                || !map.is_surjective()
            {
                return Err(Error::InvalidArgument(format!("transition R_{m} → R_{} is not a ring surjection", m - 1)));
            }
            if self.project(m, &self.alpha[m]) != self.alpha[m - 1] {
                return Err(Error::InvalidArgument(format!("α is not coherent at level {m}")));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoherentNzdReport {
    /// Ann(α_m) ⊆ p^{k_m − c}·R_m for c = slacks[m].
    pub slacks: Vec<Option<u32>>,
    pub precondition: bool,
    /// (m, m'): solutions of α·y = x at level m' have a well-defined image at level m.
    pub certified_levels: Vec<(usize, usize)>,
    pub holds: bool,
}

/// Every coherent x with x_m ∈ α_m·R_m is α·y for a coherent y, on the levels where the
/// ambiguity Ann(α_{m'}) dies in R_m.
pub fn coherent_nzd_report(sys: &ToyProjectiveSystem) -> CoherentNzdReport {
    let len = sys.len();
    let slacks: Vec<Option<u32>> = (0..len).map(|m| annihilator(&sys.ring(m), &sys.alpha[m]).slack).collect();
    let precondition = slacks.iter().all(Option::is_some);
    if !precondition {
        return CoherentNzdReport { slacks, precondition, certified_levels: vec![], holds: false };
    }
    let mut certified_levels = Vec::new();
    for m in 0..len {
        let witness = (m..len)
            .find(|&w| annihilator_generators(&sys.ring(w), &sys.alpha[w]).iter().all(|a| sys.project_to(w, m, a).iter().all(|&c| c == 0)));
        if let Some(w) = witness {
            certified_levels.push((m, w));
        }
    }
    let top = len - 1;
    let top_ring = sys.ring(top);
    let mut holds = !certified_levels.is_empty();
    for b in top_ring.basis() {
        let x_top = top_ring.mul(&sys.alpha[top], &b);
        let mut ys: Vec<Option<Vec<u64>>> = vec![None; len];
        for &(m, w) in &certified_levels {
            let x_w = sys.project_to(top, w, &x_top);
            let Some(y_w) = divide(&sys.ring(w), &sys.alpha[w], &x_w) else {
                holds = false;
                continue;
            };
            let y_m = sys.project_to(w, m, &y_w);
            let ring = sys.ring(m);
            holds &= ring.mul(&sys.alpha[m], &y_m) == sys.project_to(top, m, &x_top);
            ys[m] = Some(y_m);
        }
        for m in 1..len {
            if let (Some(hi), Some(lo)) = (&ys[m], &ys[m - 1]) {
                holds &= sys.project(m, hi) == *lo;
            }
        }
    }
    CoherentNzdReport { slacks, precondition, certified_levels, holds }
}

pub fn coherent_nzd_check(sys: &ToyProjectiveSystem) -> bool {
    coherent_nzd_report(sys).holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffpoly::{FinitePlace, FqField, FqPoly};
    use crate::grouprings::GroupRing;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn place(f: &std::sync::Arc<FqField>, c: &[u32]) -> FinitePlace {
        FinitePlace::new(FqPoly::from_codes(f, c).unwrap()).unwrap()
    }

    fn flagship(q: u32, p: &[u32]) -> TowerConfig {
        let f = FqField::prime(q).unwrap();
        TowerConfig::new(&FqPoly::one(&f), &place(&f, p), None, vec![place(&f, &[0, 1])]).unwrap()
    }

    #[test]
    fn integer_system() {
        let sys = ToyProjectiveSystem::integers(3, 4, 3, 3).unwrap();
        let r = coherent_nzd_report(&sys);
        assert!(r.precondition && r.holds);
        assert_eq!(r.slacks, vec![Some(1); 4]);
        assert_eq!(r.certified_levels, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn constant_system() {
        let groups = vec![AbelianGroup::trivial(); 3];
        let maps = vec![GroupHom::identity(&AbelianGroup::trivial()); 2];
        let unit = ToyProjectiveSystem::from_top(5, vec![4, 4, 4], groups.clone(), maps.clone(), vec![7]).unwrap();
        let r = coherent_nzd_report(&unit);
        assert!(r.holds);
        assert_eq!(r.certified_levels.len(), 3);
        // α = p never loses its ambiguity along identity maps.
        let p = ToyProjectiveSystem::from_top(5, vec![4, 4, 4], groups, maps, vec![5]).unwrap();
        assert!(!coherent_nzd_check(&p));
    }

    #[test]
    fn zero_divisor_flagged() {
        // 1 + γ with γ of order 2 is killed by 1 − γ ∉ 3R.
        let g = AbelianGroup::cyclic(2);
        let maps = vec![GroupHom::identity(&g)];
        let sys = ToyProjectiveSystem::from_top(3, vec![2, 3], vec![g.clone(), g], maps, vec![1, 1]).unwrap();
        let r = coherent_nzd_report(&sys);
        assert!(!r.precondition && !r.holds);
    }

    #[test]
    fn group_ring_system() {
        // Z/3^{m+2}[C_{3^m}] with α = 3 + (γ − 1).
        let groups: Vec<AbelianGroup> = (0..3).map(|m| AbelianGroup::cyclic(3u64.pow(m))).collect();
        let maps: Vec<GroupHom> = (1..3).map(|m| GroupHom::from_matrix(&groups[m], &groups[m - 1], &[vec![1]])).collect();
        let top = GroupRing::new(ZMod::new(3, 4), groups[2].clone());
        let alpha = top.add(&top.from_i64(2), &top.group_element(1));
        let sys = ToyProjectiveSystem::from_top(3, vec![2, 3, 4], groups, maps, alpha).unwrap();
        let r = coherent_nzd_report(&sys);
        assert!(r.precondition);
        assert!(r.holds, "{r:?}");
    }

    #[test]
    fn incoherent_alpha_rejected() {
        let g = AbelianGroup::trivial();
        let mut sys = ToyProjectiveSystem::integers(2, 2, 2, 2).unwrap();
        sys.alpha[0] = vec![1];
        assert!(sys.validate().is_err());
        let bad_map = GroupHom::from_matrix(&AbelianGroup::cyclic(2), &AbelianGroup::cyclic(4), &[vec![2]]);
        assert!(ToyProjectiveSystem::from_top(
            2,
            vec![2, 2],
            vec![AbelianGroup::cyclic(4), AbelianGroup::cyclic(2)],
            vec![bad_map],
            vec![1, 0]
        )
        .is_err());
        let _ = g;
    }

    #[test]
    fn sharp_kills_delta_invariants() {
        let group = AbelianGroup::new(vec![4, 3]);
        let z = ZMod::new(3, 5);
        let gr = GroupRing::new(z, group.clone());
        let e = sharp_idempotent(z, &group, 1).unwrap();
        assert_eq!(gr.mul(&e, &e), e);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x: Vec<u64> = (0..group.len()).map(|_| rng.gen_range(0..z.modulus())).collect();
            let s = sharp_projection(z, &group, 1, &x).unwrap();
            assert_eq!(sharp_projection(z, &group, 1, &s).unwrap(), s);
            // Δ-invariant: the Δ-norm of x.
            let norm = gr.mul(&delta_idempotent(z, &group, 1).unwrap(), &x);
            assert!(gr.is_zero(&sharp_projection(z, &group, 1, &norm).unwrap()));
        }
        assert!(sharp_idempotent(ZMod::new(2, 3), &group, 1).is_err());
    }

    #[test]
    fn sharp_of_divisor_degree_module() {
        // q = 2 flagship: d_S = 2, Z_2/2 ≠ 0 but its ♯ vanishes.
        let group = AbelianGroup::cyclic(3);
        assert_eq!(sharp_of_trivial_module(ZMod::new(2, 8), &group, 1, 2).unwrap(), (1, 0));
        assert_eq!(sharp_of_trivial_module(ZMod::new(3, 8), &AbelianGroup::new(vec![4, 3]), 1, 9).unwrap(), (2, 0));
    }

    #[test]
    fn sharp_exact_on_random_sequences() {
        let group = AbelianGroup::new(vec![2, 3]);
        let z = ZMod::new(3, 3);
        let ring = GroupRing::new(z, group.clone());
        let e = sharp_idempotent(z, &group, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let elem = |rng: &mut ChaCha8Rng| (0..group.len()).map(|_| rng.gen_range(0..z.modulus())).collect::<Vec<u64>>();
        for _ in 0..5 {
            let n = rng.gen_range(1..=2);
            let relations = (0..rng.gen_range(1..=3)).map(|_| (0..n).map(|_| elem(&mut rng)).collect()).collect();
            let m = PresentedModule { ngens: n, relations };
            let sub: Vec<Vec<Vec<u64>>> = (0..rng.gen_range(1..=2)).map(|_| (0..n).map(|_| elem(&mut rng)).collect()).collect();
            let r = sharp_exactness(&ring, &e, &m, &sub);
            assert!(r.exact, "{r:?}");
        }
    }

    #[test]
    fn flagship_run_q3() {
        let cfg = flagship(3, &[1, 0, 1]);
        let run = run_tower(&cfg, 1, &TowerOptions::default()).unwrap();
        assert!(run.all_passed(), "{}", run.summary_table());
        let g = run.geometry.as_ref().unwrap();
        assert_eq!(g.counts_model.len(), 6);
        assert!(g.main_conjecture.is_some());
        assert_eq!(run.functoriality.len(), 1);
    }

    #[test]
    fn flagship_run_q2() {
        let cfg = flagship(2, &[1, 1, 1]);
        let run = run_tower(&cfg, 1, &TowerOptions::default()).unwrap();
        assert!(run.all_passed(), "{}", run.summary_table());
        let mc = run.geometry.as_ref().unwrap().main_conjecture.as_ref().unwrap();
        assert_eq!((mc.theta_quotient_log, mc.nabla.p_order_log), (1, 1));
    }

    #[test]
    fn degenerate_run_has_no_functoriality() {
        let cfg = flagship(3, &[1, 0, 1]);
        let options = TowerOptions { geometry: false, ..TowerOptions::default() };
        let run = run_tower(&cfg, 0, &options).unwrap();
        assert!(run.functoriality.is_empty());
        assert!(run.all_passed());
    }

    #[test]
    fn sigma_choice_changes_theta_by_a_unit() {
        let cfg = flagship(3, &[1, 0, 1]);
        let f = cfg.field().clone();
        let alt = cfg.with_sigma(vec![place(&f, &[1, 1])]).unwrap();
        let layer = build_layer(&cfg, 0).unwrap();
        let theta = theta_for_layer(&cfg, &layer, None).unwrap();
        let r = sigma_independence(&cfg, &alt, &layer, &theta, 24).unwrap();
        assert!(r.holds(), "{r:?}");
    }
}
