//! Arithmetic in F_q and A = F_q[θ]: polynomials, irreducibility, factorization,
//! enumeration of places, residue rings A/𝔪 and their unit groups.

mod factor;
mod field;
mod irreducible;
mod poly;
mod residue;
mod text;

pub use factor::{distinct_degree, factor, radical, squarefree_decomposition};
pub use field::{Fq, FqField, DEFAULT_FIELD_BOUND, MAX_FIELD_SIZE};
pub use irreducible::{
    irreducible_count, irreducibles_of_degree, is_irreducible, monic_count, monic_from_index, places_up_to, FinitePlace, Place,
};
pub use poly::{poly_mul, FqPoly};
pub use residue::{unit_group, unit_group_with_budget, ResidueRing, UnitGroup, DEFAULT_UNIT_BUDGET};
pub use text::{parse_poly, parse_q, to_config_string};
