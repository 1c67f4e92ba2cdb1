//! Exact commutative algebra over Z, Z/p^k and their group rings: characters with
//! cyclotomic values, χ-components, Smith forms over Z/p^k, units, annihilators,
//! ideal equality and Fitting ideals.

mod characters;
mod chi;
mod ideal;
mod nzd;
mod ring;
mod zpk;

pub use characters::{characters, cyclotomic_integer_poly, cyclotomic_ring, Character, CyclotomicRing};
pub use chi::{hensel_cyclotomic_factor, ChiComponent, ChiComponents};
pub use ideal::{
    annihilator, annihilator_generators, determinant, direct_sum, divide, fitting_ideal, ideal_contains, ideal_equal, ideal_product,
    is_unit, mat_mul, multiplication_matrix, quotient_order_log, Annihilator, FittingIdeal,
};
pub use nzd::{nzd_test_polynomial, NzdCertificate};
pub use ring::{FiniteZpk, GroupRing, Integers, Polys, QuotientRing, Ring, Truncated, ZMod};
pub use zpk::{smith_zpk, ZpkSmith};
