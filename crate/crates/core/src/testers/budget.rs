//! Loop bounds for the testers and the arithmetic that derives them.

use serde::Serialize;

use crate::analysis::chernoff_trials;
use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// Iteration counts for the pairing loop (`k1`) and the split loop (`k2`),
/// together with the closeness parameter they were chosen for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub k1: u64,
    pub k2: u64,
    pub epsilon: Ratio,
}

impl Budget {
    pub fn new(k1: u64, k2: u64, epsilon: Ratio) -> Result<Self> {
        let b = Budget { k1, k2, epsilon };
        b.validate()?;
        Ok(b)
    }

    /// The budget `budget_for` derives for `epsilon` with `β = ε/4`,
    /// `α = 2/3` and per-loop detection `7/8`.
    pub fn for_epsilon(epsilon: Ratio) -> Result<Self> {
        Ok(Calibration::standard(epsilon)?.budget)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k1 == 0 || self.k2 == 0 {
            return Err(Error::InvalidBudget(format!(
                "loop counts must be positive (k1={}, k2={})",
                self.k1, self.k2
            )));
        }
        check_epsilon(&self.epsilon)
    }

    /// Upper bound on the queries of one self-test run: `2k₁ + 3k₂`.
    pub fn max_queries(&self) -> u64 {
        2 * self.k1 + 3 * self.k2
    }
}

fn check_epsilon(epsilon: &Ratio) -> Result<()> {
    if !epsilon.is_positive() || *epsilon >= Ratio::new(2, 3) {
        return Err(Error::InvalidBudget(format!(
            "epsilon must lie in (0, 2/3), got {epsilon}"
        )));
    }
    Ok(())
}

/// A derived budget with the per-iteration detection bounds behind it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Calibration {
    pub epsilon: Ratio,
    pub beta: Ratio,
    pub alpha: Ratio,
    pub target_confidence: Ratio,
    /// Pairing-loop detection bound `2β`.
    pub p1: Ratio,
    /// Split-loop detection bound `(1-α)(ε/2 - β - (1/α)(ε/2)²)`.
    pub p2: Ratio,
    pub budget: Budget,
}

impl Calibration {
    /// `β = ε/4`, `α = 2/3`, per-loop confidence `7/8`.
    pub fn standard(epsilon: Ratio) -> Result<Self> {
        let beta = &epsilon / &Ratio::new(4, 1);
        calibrate(&epsilon, &beta, &Ratio::new(2, 3), &Ratio::new(7, 8))
    }
}

/// Derives `(k₁, k₂)` so that each loop alone detects an `ε`-far program with
/// probability at least `target_confidence`.
pub fn calibrate(
    epsilon: &Ratio,
    beta: &Ratio,
    alpha: &Ratio,
    target_confidence: &Ratio,
) -> Result<Calibration> {
    check_epsilon(epsilon)?;
    if !alpha.is_positive() || *alpha >= Ratio::one() {
        return Err(Error::InvalidBudget(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    let half_eps = epsilon / &Ratio::new(2, 1);
    if !beta.is_positive() || *beta >= half_eps {
        return Err(Error::InvalidBudget(format!(
            "beta must lie in (0, epsilon/2), got {beta}"
        )));
    }
    if !target_confidence.is_positive() || *target_confidence >= Ratio::one() {
        return Err(Error::InvalidBudget(format!(
            "target confidence must lie in (0, 1), got {target_confidence}"
        )));
    }

    let p1 = &Ratio::new(2, 1) * beta;
    let cancellation = &(&half_eps * &half_eps) / alpha;
    let p2 = &(&Ratio::one() - alpha) * &(&(&half_eps - beta) - &cancellation);
    if !p2.is_positive() {
        return Err(Error::InvalidBudget(format!(
            "split-loop detection bound {p2} is not positive; epsilon {epsilon} is too large for alpha {alpha}, beta {beta}"
        )));
    }

    let miss = &Ratio::one() - target_confidence;
    let k1 = chernoff_trials(&p1, &miss).map_err(|e| Error::InvalidBudget(e.to_string()))?;
    let k2 = chernoff_trials(&p2, &miss).map_err(|e| Error::InvalidBudget(e.to_string()))?;
    Ok(Calibration {
        epsilon: epsilon.clone(),
        beta: beta.clone(),
        alpha: alpha.clone(),
        target_confidence: target_confidence.clone(),
        p1,
        p2,
        budget: Budget::new(k1, k2, epsilon.clone())?,
    })
}

/// The `Budget` half of [`calibrate`].
pub fn budget_for(
    epsilon: &Ratio,
    beta: &Ratio,
    alpha: &Ratio,
    target_confidence: &Ratio,
) -> Result<Budget> {
    Ok(calibrate(epsilon, beta, alpha, target_confidence)?.budget)
}
