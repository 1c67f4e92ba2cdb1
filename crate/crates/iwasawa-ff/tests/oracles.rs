//! Θ against a Dirichlet-series oracle: Σ over monic a coprime to S of σ_a^{-1} u^{deg a},
//! multiplied by the ∞ factor and the Σ smoothing, never touching the Euler product.

use iwasawa_ff::ffpoly::{parse_poly, FinitePlace, FqField, FqPoly, Place};
use iwasawa_ff::groups::AbelianGroup;
use iwasawa_ff::lfun::{theta, theta_for_layer};
use iwasawa_ff::rayclass::{build_layer, GaloisLayer, TowerConfig};

fn flagship(q: u32, p: &str, sigma: &str) -> TowerConfig {
    let field = FqField::prime(q).unwrap();
    let prime = FinitePlace::new(parse_poly(&field, p).unwrap()).unwrap();
    let sigma = FinitePlace::new(parse_poly(&field, sigma).unwrap()).unwrap();
    TowerConfig::new(&FqPoly::one(&field), &prime, None, vec![sigma]).unwrap()
}

fn monic_of_degree(field: &std::sync::Arc<FqField>, d: usize) -> Vec<FqPoly> {
    let q = field.q();
    let total = (q as u64).pow(d as u32);
    (0..total)
        .map(|mut key| {
            let mut codes = Vec::with_capacity(d + 1);
            for _ in 0..d {
                codes.push((key % q as u64) as u32);
                key /= q as u64;
            }
            codes.push(1);
            FqPoly::from_codes(field, &codes).unwrap()
        })
        .collect()
}

/// a · (1 − c·σ u^d) for σ a group index, truncated at `degree`.
fn times_one_minus(group: &AbelianGroup, a: &[Vec<i128>], c: i128, sigma: usize, d: usize) -> Vec<Vec<i128>> {
    let mut out = a.to_vec();
    for j in d..a.len() {
        for h in 0..group.len() {
            out[j][group.mul_idx(sigma, h)] -= c * a[j - d][h];
        }
    }
    out
}

fn dirichlet_oracle(cfg: &TowerConfig, layer: &GaloisLayer, degree: usize) -> Vec<Vec<i128>> {
    let group = layer.group();
    let field = cfg.field();
    let bad: Vec<&FqPoly> = cfg.s().iter().filter_map(Place::finite).map(FinitePlace::gen).collect();
    let mut series = vec![vec![0i128; group.len()]; degree + 1];
    for d in 0..=degree {
        for a in monic_of_degree(field, d) {
            if bad.iter().any(|v| !a.gcd(v).is_one()) {
                continue;
            }
            let g = group.index(&layer.image_of_unit(&a).unwrap());
            series[d][group.inv_idx(g)] += 1;
        }
    }
    if !cfg.infinity_in_s() {
        // (1 − u)^{-1}: running sums.
        for j in 1..=degree {
            for h in 0..group.len() {
                series[j][h] += series[j - 1][h];
            }
        }
    }
    let q = field.q() as i128;
    for v in cfg.sigma() {
        let sigma = group.inv_idx(group.index(&layer.image_of_unit(v.gen()).unwrap()));
        let d = v.degree();
        series = times_one_minus(group, &series, q.pow(d as u32), sigma, d);
    }
    series
}

fn assert_matches_oracle(cfg: &TowerConfig, n: usize) {
    let layer = build_layer(cfg, n).unwrap();
    let result = theta_for_layer(cfg, &layer, None).unwrap();
    let degree = result.certificate.enumeration_degree;
    let oracle = dirichlet_oracle(cfg, &layer, degree);
    for (j, c) in oracle.iter().enumerate() {
        assert_eq!(&result.theta.coeff(j), c, "coefficient of u^{j} at n = {n}");
    }
}

#[test]
fn flagship_q3_matches_dirichlet_series() {
    let cfg = flagship(3, "x^2+1", "x");
    assert_matches_oracle(&cfg, 0);
    assert_matches_oracle(&cfg, 1);
}

#[test]
fn flagship_q2_matches_dirichlet_series() {
    let cfg = flagship(2, "x^2+x+1", "x");
    assert_matches_oracle(&cfg, 0);
    assert_matches_oracle(&cfg, 1);
}

/// ζ_A(u) = 1/(1 − qu); dropping (θ) multiplies by 1 − u and smoothing at (θ+1) by 1 − qu.
#[test]
fn sanity_identity_against_zeta_algebra() {
    let field = FqField::prime(2).unwrap();
    let x = FqPoly::var(&field);
    let s = vec![Place::Infinity, Place::Finite(FinitePlace::new(x.clone()).unwrap())];
    let sigma = FinitePlace::new(parse_poly(&field, "x+1").unwrap()).unwrap();
    let cfg = TowerConfig::new(&FqPoly::one(&field), &FinitePlace::new(x).unwrap(), Some(s), vec![sigma]).unwrap();
    let layer = GaloisLayer::trivial(&field);
    let got = theta_for_layer(&cfg, &layer, Some(12)).unwrap();

    let degree = 12;
    let q = 2i128;
    let mut zeta: Vec<i128> = (0..=degree).map(|d| q.pow(d as u32)).collect();
    let mul_one_minus = |a: &[i128], c: i128| -> Vec<i128> { (0..a.len()).map(|j| a[j] - if j > 0 { c * a[j - 1] } else { 0 }).collect() };
    zeta = mul_one_minus(&zeta, 1);
    zeta = mul_one_minus(&zeta, q);
    let mut expected = zeta;
    while expected.last() == Some(&0) {
        expected.pop();
    }
    assert_eq!(expected, vec![1, -1]);
    let flat: Vec<i128> = got.theta.coeffs.iter().map(|c| c[0]).collect();
    assert_eq!(flat, expected);
    assert_eq!(got.theta.group.len(), 1);
}

#[test]
fn module_level_theta_entry_point() {
    let cfg = flagship(3, "x^2+1", "x");
    let a = theta(&cfg, 0, None).unwrap();
    let b = theta_for_layer(&cfg, &build_layer(&cfg, 0).unwrap(), None).unwrap();
    assert_eq!(a.theta, b.theta);
}
