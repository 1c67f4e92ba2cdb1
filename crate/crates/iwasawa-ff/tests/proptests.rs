use iwasawa_ff::ffpoly::{factor, irreducibles_of_degree, unit_group, FqField, FqPoly, ResidueRing};
use iwasawa_ff::grouprings::{GroupRing, Ring, ZMod};
use iwasawa_ff::groups::{AbelianGroup, GroupHom};
use iwasawa_ff::properties::{
    check_base_change, check_direct_sum, check_matrix_lifting, check_presentation_invariance, suite_ring, Matrix,
};
use iwasawa_ff::tower::{coherent_nzd_report, sharp_of_trivial_module};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poly(field: &std::sync::Arc<FqField>, codes: &[u32]) -> FqPoly {
    let q = field.q();
    let codes: Vec<u32> = codes.iter().map(|c| c % q).collect();
    FqPoly::from_codes(field, &codes).unwrap()
}

fn matrix(ring: &GroupRing<ZMod>, rows: usize, cols: usize, raw: &[u64]) -> Matrix {
    let n = ring.group().len();
    let m = ring.base().modulus();
    (0..rows).map(|i| (0..cols).map(|j| (0..n).map(|g| raw[(i * cols + j) * n + g] % m).collect()).collect()).collect()
}

/// Lower-unitriangular times diagonal group elements times upper-unitriangular.
fn invertible(ring: &GroupRing<ZMod>, n: usize, raw: &[u64]) -> Matrix {
    let a = matrix(ring, n, n, raw);
    let mut lower = a.clone();
    let mut upper = a;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                lower[i][j] = ring.one();
                upper[i][j] = ring.group_element((raw[i] as usize) % ring.group().len());
            } else if j > i {
                lower[i][j] = ring.zero();
            } else {
                upper[i][j] = ring.zero();
            }
        }
    }
    iwasawa_ff::grouprings::mat_mul(ring, &lower, &upper)
}

fn raw(len: usize) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(0u64..1_000, len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn factorization_round_trips(q in prop::sample::select(vec![2u32, 3, 5]), codes in prop::collection::vec(0u32..5, 2..9)) {
        let field = FqField::prime(q).unwrap();
        let f = poly(&field, &codes);
        prop_assume!(f.degree().unwrap_or(0) >= 1);
        let mut product = FqPoly::constant(&field, f.leading());
        for (g, e) in factor(&f.monic()).unwrap() {
            prop_assert!(g.is_monic());
            product = product.try_mul(&g.pow(e as u64)).unwrap();
        }
        prop_assert_eq!(product, f);
    }

    #[test]
    fn unit_group_order_matches_totient(q in prop::sample::select(vec![2u32, 3]), codes in prop::collection::vec(0u32..3, 2..6)) {
        let field = FqField::prime(q).unwrap();
        let mut codes = codes;
        codes.push(1);
        let m = poly(&field, &codes);
        let ring = ResidueRing::new(&m).unwrap();
        let expected: u64 = factor(&m)
            .unwrap()
            .iter()
            .map(|(g, e)| {
                let norm = (q as u64).pow(g.deg() as u32);
                (norm - 1) * norm.pow(*e as u32 - 1)
            })
            .product();
        prop_assert_eq!(ring.unit_count().unwrap(), expected);
        prop_assert_eq!(unit_group(&ring).unwrap().group().order(), expected);
    }

    #[test]
    fn presentation_invariance(shape in (1usize..=2, 0usize..=1), a in raw(64), u in raw(64), v in raw(64), extra in raw(64)) {
        let ring = suite_ring();
        let (n, more) = shape;
        let r = n + more;
        let a = matrix(&ring, r, n, &a);
        let u = invertible(&ring, r, &u);
        let v = invertible(&ring, n, &v);
        let extra: Vec<Vec<u64>> = matrix(&ring, 1, r.max(n), &extra).remove(0);
        prop_assert_eq!(check_presentation_invariance(&ring, &a, n, &u, &v, &extra), Some(true));
    }

    #[test]
    fn fitting_of_direct_sum(a in raw(64), b in raw(64), rows in (1usize..=2, 1usize..=2)) {
        let ring = suite_ring();
        let a = matrix(&ring, rows.0, 1, &a);
        let b = matrix(&ring, rows.1, 1, &b);
        prop_assert!(check_direct_sum(&ring, &a, 1, &b, 1));
    }

    #[test]
    fn fitting_base_change(a in raw(64), rows in 2usize..=2) {
        let source = suite_ring();
        let target = GroupRing::new(ZMod::new(3, 2), AbelianGroup::cyclic(3));
        let hom = GroupHom::from_matrix(source.group(), target.group(), &[vec![0], vec![1]]);
        let a = matrix(&source, rows, 2, &a);
        prop_assert!(check_base_change(&source, &target, &hom, &a, 2));
    }

    #[test]
    fn matrix_lifting(u in raw(64)) {
        let group = AbelianGroup::new(vec![2, 3]);
        let fine = GroupRing::new(ZMod::new(3, 8), group.clone());
        let coarse = GroupRing::new(ZMod::new(3, 4), group);
        let u = matrix(&fine, 2, 2, &u.iter().map(|x| x * 6_561 / 1_000).collect::<Vec<_>>());
        prop_assert!(check_matrix_lifting(&fine, &coarse, &u));
    }

    #[test]
    fn coherent_nzd_never_fails_its_precondition(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let system = iwasawa_ff::properties::random_toy_system(&mut rng);
        let report = coherent_nzd_report(&system);
        prop_assert!(!report.precondition || report.holds);
    }

    #[test]
    fn sharp_kills_trivial_modules(d in prop::sample::select(vec![1u64, 2, 3, 4, 6, 9, 12, 18, 27])) {
        let z = ZMod::new(3, 3);
        let (whole, sharp) = sharp_of_trivial_module(z, &AbelianGroup::new(vec![4, 3]), 1, d).unwrap();
        prop_assert_eq!(sharp, 0);
        prop_assert!(whole <= 3);
    }
}

#[test]
fn irreducible_counts_satisfy_gauss() {
    for q in [2u32, 3, 4, 5] {
        let field = if q == 4 { FqField::new(2, 2).unwrap() } else { FqField::prime(q).unwrap() };
        for d in 1..=5usize {
            let total: u64 =
                (1..=d).filter(|e| d % e == 0).map(|e| e as u64 * irreducibles_of_degree(&field, e).unwrap().len() as u64).sum();
            assert_eq!(total, (q as u64).pow(d as u32), "q = {q}, d = {d}");
        }
    }
}
