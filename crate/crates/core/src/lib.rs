//! Randomized testing of programs that claim to compute linear functions.
//!
//! A program under test is wrapped in an [`Oracle`]. The testers in
//! [`testers`] decide, with a constant number of queries, whether it computes
//! a given linear function `f(x) = b·x` (or `Σ bᵢxᵢ` on vectors) on the
//! domain of `n`-bit integers, whether it computes *some* linear function, or
//! whether it answers correctly at one particular input.
//!
//! [`adversaries`] builds faulty programs with known error rates and
//! [`analysis`] computes the exact probabilities the testers should observe on
//! small domains by enumeration.

pub mod adversaries;
pub mod analysis;
pub mod campaign;
pub mod cli;
pub mod domain;
mod error;
pub mod oracle;
mod permute;
pub mod ratio;
pub mod testers;

pub use domain::{
    sample_point, sample_uniform, shift_mul_pow2, split_random, split_random_multi, DomainParams,
    LinearSpec, SplitOutcome, VectorDomainParams,
};
pub use error::{Error, OracleError, Result};
pub use oracle::{LinearProgram, Oracle, Program};
pub use testers::{Budget, FailureSite, Outcome, Verdict, Witness};

/// Seedable generator used by every tester and campaign.
pub type TestRng = rand_chacha::ChaCha8Rng;

/// Builds the generator for `seed`.
pub fn rng_from_seed(seed: u64) -> TestRng {
    use rand::SeedableRng;
    TestRng::seed_from_u64(seed)
}
