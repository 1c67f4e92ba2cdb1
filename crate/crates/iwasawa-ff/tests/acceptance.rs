//! Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Tolerances are pinned in [`TOLERANCES`]; every comparison is exact and the only
//! slack is wall-clock time.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use iwasawa_ff::config::RunConfig;
use iwasawa_ff::ffpoly::{parse_poly, FinitePlace, FqField, FqPoly, Place};
use iwasawa_ff::geometry::{charpoly_comparison, count_points_model, count_points_splitting, zeta_numerator, CurveModel, FixedField};
use iwasawa_ff::lfun::{functoriality_check, order_of_vanishing_all, sigma_factor_unit, stability_recheck, theta_for_layer};
use iwasawa_ff::properties::run_algebra_suite;
use iwasawa_ff::rayclass::{build_layer, GaloisLayer, TowerConfig};
use iwasawa_ff::tower::{alternative_sigma, main_conjecture_shadow, sigma_independence};

struct Tolerance {
    id: u8,
    /// Wall-clock ceiling for the whole criterion (or per layer where noted).
    seconds: f64,
    precision: Option<u32>,
    truncation: Option<usize>,
    cases: Option<usize>,
}

const POINT_BUDGET: u64 = 10_000_000;
const ALGEBRA_SEED: u64 = 20_240_601;

const TOLERANCES: [Tolerance; 11] = [
    Tolerance { id: 1, seconds: 1.0, precision: None, truncation: Some(12), cases: None },
    Tolerance { id: 2, seconds: 60.0, precision: None, truncation: None, cases: None },
    Tolerance { id: 3, seconds: 60.0, precision: None, truncation: None, cases: None },
    Tolerance { id: 4, seconds: 60.0, precision: None, truncation: None, cases: None },
    Tolerance { id: 5, seconds: 60.0, precision: Some(6), truncation: Some(6), cases: None },
    Tolerance { id: 6, seconds: 120.0, precision: None, truncation: Some(6), cases: None },
    Tolerance { id: 7, seconds: 120.0, precision: Some(24), truncation: None, cases: None },
    Tolerance { id: 8, seconds: 120.0, precision: Some(24), truncation: None, cases: None },
    Tolerance { id: 9, seconds: 120.0, precision: Some(12), truncation: Some(12), cases: None },
    Tolerance { id: 10, seconds: 300.0, precision: None, truncation: None, cases: Some(200) },
    Tolerance { id: 11, seconds: 300.0, precision: None, truncation: None, cases: Some(20) },
];

fn tol(id: u8) -> &'static Tolerance {
    TOLERANCES.iter().find(|t| t.id == id).expect("pinned tolerance")
}

type Outcome = Result<(bool, String), String>;
type Criterion = (u8, &'static str, fn() -> Outcome);

fn flagship(name: &str) -> TowerConfig {
    let text = match name {
        "q3" => include_str!("../../../configs/flagship_q3.json"),
        _ => include_str!("../../../configs/flagship_q2.json"),
    };
    RunConfig::from_json(text).and_then(|c| c.tower_config()).expect("shipped flagship configs parse")
}

fn flagships() -> [(&'static str, TowerConfig); 2] {
    [("q=3", flagship("q3")), ("q=2", flagship("q2"))]
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn sanity_identity() -> Outcome {
    let field = FqField::prime(2).map_err(e)?;
    let x = FqPoly::var(&field);
    let theta_place = FinitePlace::new(x).map_err(e)?;
    let sigma = FinitePlace::new(parse_poly(&field, "x+1").map_err(e)?).map_err(e)?;
    let s = vec![Place::Infinity, Place::Finite(theta_place.clone())];
    let cfg = TowerConfig::new(&FqPoly::one(&field), &theta_place, Some(s), vec![sigma]).map_err(e)?;
    let got = theta_for_layer(&cfg, &GaloisLayer::trivial(&field), tol(1).truncation).map_err(e)?;
    let flat: Vec<i128> = got.theta.coeffs.iter().map(|c| c[0]).collect();

    // ζ_A(u)·(1 − u)·(1 − 2u) with ζ_A(u) = Σ 2^d u^d, truncated at degree 12.
    let degree = tol(1).truncation.unwrap_or(12);
    let mut series: Vec<i128> = (0..=degree as u32).map(|d| 2i128.pow(d)).collect();
    for c in [1i128, 2] {
        series = (0..series.len()).map(|j| series[j] - if j > 0 { c * series[j - 1] } else { 0 }).collect();
    }
    while series.last() == Some(&0) {
        series.pop();
    }
    let ok = flat == vec![1, -1] && series == flat;
    Ok((ok, format!("Θ = {flat:?}, symbolic = {series:?}")))
}

fn stabilization() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, cfg) in flagships() {
        for n in 0..=1 {
            let start = Instant::now();
            let layer = build_layer(&cfg, n).map_err(e)?;
            let r = theta_for_layer(&cfg, &layer, None).map_err(e)?;
            let stable = stability_recheck(&cfg, &layer, &r).map_err(e)?;
            let secs = start.elapsed().as_secs_f64();
            let c = &r.certificate;
            let layer_ok = c.window_vanishes && c.per_character_window_vanishes && stable && secs < tol(2).seconds;
            ok &= layer_ok;
            detail.push(format!("{name} n={n}: bound {} D {} stable {stable} {secs:.2}s", c.bound, c.enumeration_degree));
        }
    }
    Ok((ok, detail.join("; ")))
}

fn functoriality() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (name, cfg) in flagships() {
        let r = functoriality_check(&cfg, 1, 0).map_err(e)?;
        ok &= r.equal;
        detail.push(format!("{name}: equal {} (deg {:?})", r.equal, r.base.degree()));
    }
    Ok((ok, detail.join("; ")))
}

fn order_of_vanishing() -> Outcome {
    let mut ok = true;
    let mut checked = 0;
    for (_, cfg) in flagships() {
        for n in 0..=1 {
            let layer = build_layer(&cfg, n).map_err(e)?;
            let r = theta_for_layer(&cfg, &layer, None).map_err(e)?;
            for rep in order_of_vanishing_all(&cfg, &layer, &r).map_err(e)? {
                ok &= rep.agrees();
                checked += 1;
            }
        }
    }
    Ok((ok && checked > 0, format!("{checked} nontrivial characters")))
}

fn sigma_unit() -> Outcome {
    let t = tol(5);
    let (k, m) = (t.precision.unwrap_or(6), t.truncation.unwrap_or(6));
    let mut ok = true;
    let mut checked = 0;
    for (_, cfg) in flagships() {
        for n in 0..=1 {
            let layer = build_layer(&cfg, n).map_err(e)?;
            for v in cfg.sigma() {
                ok &= sigma_factor_unit(&cfg, &layer, v, k, m).map_err(e)?.verified;
                checked += 1;
            }
        }
    }
    Ok((ok, format!("{checked} witnesses at (p^{k}, u^{m})")))
}

fn point_count_oracles() -> Outcome {
    let cfg = flagship("q3");
    let layer = build_layer(&cfg, 0).map_err(e)?;
    let model = CurveModel::for_layer(&layer).map_err(e)?;
    let ff = FixedField::full(&layer);
    let m = tol(6).truncation.unwrap_or(6);
    let mut model_counts = Vec::new();
    let mut split_counts = Vec::new();
    for i in 1..=m {
        model_counts.push(count_points_model(&model, i, POINT_BUDGET).map_err(e)?);
        split_counts.push(count_points_splitting(&ff, i, POINT_BUDGET).map_err(e)?);
    }
    let zeta = zeta_numerator(&model_counts, 3).map_err(e)?;
    let ok = model_counts == split_counts && zeta.functional_equation_holds() && zeta.weil_bounds_hold();
    Ok((ok, format!("N = {model_counts:?}, g = {}, P = {:?}", zeta.genus, zeta.numerator)))
}

fn flagship_layer0() -> Result<(TowerConfig, GaloisLayer, iwasawa_ff::lfun::ThetaResult), String> {
    let cfg = flagship("q3");
    let layer = build_layer(&cfg, 0).map_err(e)?;
    let theta = theta_for_layer(&cfg, &layer, None).map_err(e)?;
    Ok((cfg, layer, theta))
}

fn model_zeta(layer: &GaloisLayer) -> Result<iwasawa_ff::geometry::ZetaData, String> {
    let model = CurveModel::for_layer(layer).map_err(e)?;
    let counts = (1..=6).map(|i| count_points_model(&model, i, POINT_BUDGET)).collect::<Result<Vec<u64>, _>>().map_err(e)?;
    zeta_numerator(&counts, model.field().q() as u64).map_err(e)
}

fn main_conjecture() -> Outcome {
    let (cfg, layer, theta) = flagship_layer0()?;
    let zeta = model_zeta(&layer)?;
    let k = tol(7).precision.unwrap_or(24);
    let r = main_conjecture_shadow(&cfg, &layer, &theta, &zeta, k).map_err(e)?;
    let ok = r.agrees && r.nabla.hypotheses.all_hold();
    Ok((ok, format!("|∇| = 3^{}, |Z/3^{k}[G]/(Θ(1))| = 3^{}, h = {}", r.nabla.p_order_log, r.theta_quotient_log, zeta.h)))
}

fn sigma_independent() -> Outcome {
    let (cfg, layer, theta) = flagship_layer0()?;
    let alt = alternative_sigma(&cfg).map_err(e)?.ok_or("no alternative Σ")?;
    let k = tol(8).precision.unwrap_or(24);
    let r = sigma_independence(&cfg, &alt, &layer, &theta, k).map_err(e)?;
    let zeta = model_zeta(&layer)?;
    let alt_theta = theta_for_layer(&alt, &layer, None).map_err(e)?;
    let shadow = main_conjecture_shadow(&alt, &layer, &alt_theta, &zeta, k).map_err(e)?;
    let ok = r.holds() && shadow.agrees;
    Ok((ok, format!("Σ {:?} → {:?}: quotient 3^{} vs 3^{}", r.sigma, r.alternative, r.quotient_log, r.alternative_quotient_log)))
}

fn charpoly() -> Outcome {
    let (cfg, layer, theta) = flagship_layer0()?;
    let t = tol(9);
    let r = charpoly_comparison(&cfg, &layer, &theta, t.precision.unwrap_or(12), t.truncation.unwrap_or(12), POINT_BUDGET).map_err(e)?;
    Ok((r.holds(), format!("{} orbits, charpoly {:?}", r.orbits.len(), r.charpoly)))
}

fn algebra(names: &[&str], min_cases: usize) -> Outcome {
    let report = run_algebra_suite(ALGEBRA_SEED, tol(10).cases.unwrap_or(200));
    let mut ok = true;
    let mut detail = Vec::new();
    for name in names {
        let t = report.get(name).ok_or(format!("{name} missing"))?;
        let wanted = match *name {
            "coherent-nzd" | "sharp-exactness" => min_cases.min(20),
            "sharp-kills-trivial-action" => 1,
            _ => min_cases,
        };
        ok &= t.holds() && t.cases >= wanted;
        detail.push(format!("{name} {}/{}", t.passed, t.cases));
    }
    Ok((ok, detail.join(", ")))
}

fn fitting_suites() -> Outcome {
    algebra(
        &["fitting-presentation-invariance", "fitting-direct-sum", "fitting-base-change", "matrix-lifting", "coherent-nzd"],
        tol(10).cases.unwrap_or(200),
    )
}

fn sharp_suites() -> Outcome {
    algebra(&["sharp-kills-trivial-action", "sharp-exactness"], tol(11).cases.unwrap_or(20))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        (1, "theta-sanity-identity", sanity_identity),
        (2, "stabilization-certificate", stabilization),
        (3, "functoriality", functoriality),
        (4, "order-of-vanishing", order_of_vanishing),
        (5, "sigma-factor-unit", sigma_unit),
        (6, "point-count-oracles", point_count_oracles),
        (7, "main-conjecture-shadow", main_conjecture),
        (8, "sigma-independence", sigma_independent),
        (9, "charpoly-identity", charpoly),
        (10, "algebra-properties", fitting_suites),
        (11, "sharp-functor", sharp_suites),
    ];
    let mut failures = 0;
    for (id, name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let ceiling = Duration::from_secs_f64(tol(id).seconds);
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok && elapsed <= ceiling, detail),
            Err(err) => (false, format!("error: {err}")),
        };
        if !ok {
            failures += 1;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!("{status} [{id:>2}] {name:<28} {:>8.3}s (limit {:.0}s)  {detail}", elapsed.as_secs_f64(), tol(id).seconds);
    }
    println!("{} of {} criteria passed", TOLERANCES.len() - failures, TOLERANCES.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
