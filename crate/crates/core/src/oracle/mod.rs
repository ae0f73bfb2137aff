//! Brute-force verifiers for the algorithms elsewhere in the crate.
//!
//! Each oracle recomputes its quantity from first principles (literal
//! Minkowski sums, explicit enumeration over finite fields, resultants,
//! direct differentiation) and shares no algorithmic code with the module
//! it checks.

mod finite_field;
mod geometry;
mod resultant;
mod sampling;
mod symbolic;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub use finite_field::{count_distinct_roots_closure, Elem, FiniteField, PrimeFieldPoly, MAX_ORACLE_PRIME};
pub use geometry::{
    affine_dim, brute_force_defects, brute_force_trichotomy, mixed_volume_by_polarization, normalized_volume,
    rank_rational, volume_by_lattice_triangulation, BruteVerdict, BRUTE_SUM_CAP,
};
pub use resultant::{resultant_count_2d, resultant_count_explicit, sylvester_resultant_y, ResultantStats, Terms};
pub use sampling::{sample_common_solutions, SampleStats, SAMPLE_CAP};
pub use symbolic::symbolic_tower_check;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{0} is not a supported prime")]
    NotPrime(u64),
    #[error("invalid extension: {0}")]
    BadModulus(String),
    #[error("the zero polynomial has no finite root count")]
    ZeroPolynomial,
    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),
    #[error("no supports given")]
    NoSupports,
    #[error("resultant counting needs supports in Z^2")]
    NotBivariate,
}

/// The random stream for trial `trial` under `seed`; streams never overlap.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}
