//! Trial counts from the multiplicative Chernoff bound
//! `Pr[X < (1-δ)np] ≤ exp(-δ²np/2)`.
//!
//! Running a test whose per-trial detection probability is `p` for `N`
//! trials misses every time with probability at most
//! `exp(-(Np-1)²/(2Np))`, taking `δ = (Np-1)/(Np)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// Slack on floating-point comparisons of Chernoff exponents.
pub const CERTIFICATE_SLACK: f64 = 1e-9;

/// `(μ-1)²/μ` for `μ = np`; the bound is `exp(-certificate/2)`.
pub fn certificate(np: f64) -> f64 {
    (np - 1.0).powi(2) / np
}

/// `exp(-(np-1)²/(2np))`, the probability of seeing no detection.
pub fn miss_bound(np: f64) -> f64 {
    (-certificate(np) / 2.0).exp()
}

/// A per-trial detection probability, a trial count, and the resulting
/// bound on missing every time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChernoffQuery {
    pub p: Ratio,
    pub trials: u64,
    pub failure_bound: f64,
}

impl ChernoffQuery {
    /// Requires `trials·p > 1`, where `δ` lies in `(0, 1)`.
    pub fn new(p: Ratio, trials: u64) -> Result<Self> {
        check_p(&p)?;
        let np = (&p * &Ratio::from_integer(trials)).to_f64();
        if np <= 1.0 {
            return Err(Error::InvalidProbability(format!(
                "the bound needs trials·p > 1, got {np}"
            )));
        }
        Ok(ChernoffQuery {
            p,
            trials,
            failure_bound: miss_bound(np),
        })
    }
}

fn check_p(p: &Ratio) -> Result<()> {
    if !p.is_positive() || *p > Ratio::one() {
        return Err(Error::InvalidProbability(format!(
            "detection probability must lie in (0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Number of trials after which a test with detection probability `p`
/// misses with probability at most `target_failure`.
///
/// For the target `1/8` this is `⌈6/p⌉`: at `np = 6` the certificate is
/// `25/6 > ln 64`. Other targets solve `(μ-1)²/μ ≥ 2 ln(1/t)` for `μ`.
/// Either way the certificate is re-verified at the returned count.
pub fn chernoff_trials(p: &Ratio, target_failure: &Ratio) -> Result<u64> {
    check_p(p)?;
    if !target_failure.is_positive() || *target_failure >= Ratio::one() {
        return Err(Error::InvalidProbability(format!(
            "target failure must lie in (0, 1), got {target_failure}"
        )));
    }
    let required = 2.0 * (1.0 / target_failure.to_f64()).ln();
    let too_many = || Error::InvalidProbability(format!("trial count for p = {p} overflows"));

    let mut trials = if *target_failure == Ratio::new(1, 8) {
        (&Ratio::from_integer(6) / p).ceil()
    } else {
        let c = 2.0 + required;
        let mu = (c + (c * c - 4.0).sqrt()) / 2.0;
        let estimate = (mu / p.to_f64()).ceil();
        if !estimate.is_finite() || estimate > u64::MAX as f64 {
            return Err(too_many());
        }
        BigInt::from(estimate as u64)
    }
    .to_u64()
    .ok_or_else(too_many)?;

    loop {
        let np = (p * &Ratio::from_integer(trials)).to_f64();
        if np > 1.0 && certificate(np) >= required - CERTIFICATE_SLACK {
            return Ok(trials);
        }
        trials = trials.checked_add(1).ok_or_else(too_many)?;
    }
}
