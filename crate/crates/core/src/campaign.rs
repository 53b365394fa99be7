//! Seeded Monte Carlo campaigns over many independent tester runs.
//!
//! Trial `i` of a campaign seeded with `s` draws from its own generator
//! seeded with `s ^ i`, so results do not depend on how trials are scheduled
//! across worker threads.

use num_bigint::{BigInt, BigUint};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Beta, ContinuousCDF};

use crate::domain::sample_point;
use crate::domain::LinearSpec;
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::testers::{pairing_check_multi, rand_split_check_multi, Verdict};
use crate::{rng_from_seed, TestRng};

/// Seed for trial `trial` of a campaign seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    seed ^ trial
}

/// One tester run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub verdict: Verdict,
    /// Coefficient learned by the property tester on PASS.
    #[serde(
        with = "crate::ratio::opt_bigint_str",
        skip_serializing_if = "Option::is_none"
    )]
    pub learned_b: Option<BigInt>,
}

/// A two-sided exact binomial confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub confidence: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Aggregate counts of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub trials: u64,
    pub failures: u64,
    pub fail_rate: f64,
    pub fail_rate_ci: Interval,
    pub total_queries: u64,
    pub max_queries: u64,
}

impl Summary {
    pub fn from_records(records: &[TrialRecord], confidence: f64) -> Result<Self> {
        let trials = records.len() as u64;
        let failures = records.iter().filter(|r| r.verdict.failed()).count() as u64;
        let queries = records.iter().map(|r| r.verdict.queries_used);
        Ok(Summary {
            trials,
            failures,
            fail_rate: if trials == 0 {
                0.0
            } else {
                failures as f64 / trials as f64
            },
            fail_rate_ci: clopper_pearson(failures, trials, confidence)?,
            total_queries: queries.clone().sum(),
            max_queries: queries.max().unwrap_or(0),
        })
    }
}

/// Clopper–Pearson interval for `successes` out of `trials`.
pub fn clopper_pearson(successes: u64, trials: u64, confidence: f64) -> Result<Interval> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::InvalidProbability(format!(
            "confidence {confidence} is not in (0, 1)"
        )));
    }
    if successes > trials {
        return Err(Error::Config(format!(
            "{successes} successes out of {trials} trials"
        )));
    }
    if trials == 0 {
        return Ok(Interval {
            confidence,
            lower: 0.0,
            upper: 1.0,
        });
    }
    let tail = (1.0 - confidence) / 2.0;
    let (k, n) = (successes as f64, trials as f64);
    let quantile = |a: f64, b: f64, q: f64| -> Result<f64> {
        let beta = Beta::new(a, b).map_err(|e| Error::InvalidProbability(e.to_string()))?;
        Ok(beta.inverse_cdf(q))
    };
    let lower = if successes == 0 {
        0.0
    } else {
        quantile(k, n - k + 1.0, tail)?
    };
    let upper = if successes == trials {
        1.0
    } else {
        quantile(k + 1.0, n - k, 1.0 - tail)?
    };
    Ok(Interval {
        confidence,
        lower,
        upper,
    })
}

/// Runs `trials` independent trials of `run`, each with its own generator.
///
/// With `parallel = Some(k)` the trials are spread over `k` worker threads;
/// the returned records are in trial order either way.
pub fn run_trials<F>(
    trials: u64,
    seed: u64,
    parallel: Option<usize>,
    run: F,
) -> Result<Vec<TrialRecord>>
where
    F: Fn(&mut TestRng) -> Result<(Verdict, Option<BigInt>)> + Sync,
{
    let one = |trial: u64| -> Result<TrialRecord> {
        let seed = trial_seed(seed, trial);
        let (verdict, learned_b) = run(&mut rng_from_seed(seed))?;
        Ok(TrialRecord {
            trial,
            seed,
            verdict,
            learned_b,
        })
    };
    match parallel {
        Some(k) if k > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?;
            pool.install(|| (0..trials).into_par_iter().map(one).collect())
        }
        _ => (0..trials).map(one).collect(),
    }
}

/// A Monte Carlo estimate of a failure probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub samples: u64,
    pub failures: u64,
    pub rate: f64,
    /// `sqrt(rate·(1 - rate)/samples)`.
    pub std_error: f64,
}

impl Estimate {
    fn new(samples: u64, failures: u64) -> Self {
        let rate = failures as f64 / samples as f64;
        Estimate {
            samples,
            failures,
            rate,
            std_error: (rate * (1.0 - rate) / samples as f64).sqrt(),
        }
    }

    /// Distance to `exact` in units of the exact binomial standard error.
    pub fn deviation_from(&self, exact: f64) -> f64 {
        let sigma = (exact * (1.0 - exact) / self.samples as f64).sqrt();
        let diff = (self.rate - exact).abs();
        if sigma == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / sigma
        }
    }
}

fn estimate(samples: u64, mut fails: impl FnMut() -> Result<bool>) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::Config("at least one sample is required".into()));
    }
    let mut failures = 0;
    for _ in 0..samples {
        failures += u64::from(fails()?);
    }
    Ok(Estimate::new(samples, failures))
}

/// Estimates the probability that one pairing iteration at uniform `x` fails.
pub fn estimate_pairing_fail(
    spec: &LinearSpec,
    oracle: &Oracle,
    samples: u64,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    let domain = oracle.domain();
    estimate(samples, || {
        let x = sample_point(&domain, rng);
        Ok(pairing_check_multi(&x, spec, oracle)?.failed())
    })
}

/// Estimates the probability that one split iteration fails, at a fixed `x`
/// or (with `at = None`) at uniform `x`.
pub fn estimate_split_fail(
    spec: &LinearSpec,
    oracle: &Oracle,
    at: Option<&[BigUint]>,
    samples: u64,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    let domain = oracle.domain();
    estimate(samples, || {
        let x = match at {
            Some(x) => x.to_vec(),
            None => sample_point(&domain, rng),
        };
        Ok(rand_split_check_multi(&x, spec, oracle, rng)?.failed())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{DomainParams, VectorDomainParams};
    use crate::ratio::Ratio;
    use crate::testers::{self_test, Budget};

    #[test]
    fn interval_edges_have_closed_forms() {
        // With no successes the upper limit solves (1-p)^n = tail.
        let ci = clopper_pearson(0, 100, 0.95).unwrap();
        assert_eq!(ci.lower, 0.0);
        assert!((ci.upper - (1.0 - 0.025f64.powf(1.0 / 100.0))).abs() < 1e-9);
        let ci = clopper_pearson(100, 100, 0.95).unwrap();
        assert_eq!(ci.upper, 1.0);
        assert!((ci.lower - 0.025f64.powf(1.0 / 100.0)).abs() < 1e-9);
    }

    #[test]
    fn interval_tails_match_binomial_sums() {
        // At the lower limit the probability of at least k successes is the tail.
        let (k, n) = (37u64, 120u64);
        let ci = clopper_pearson(k, n, 0.9).unwrap();
        let at_least = |p: f64| -> f64 {
            (k..=n)
                .map(|j| {
                    let ln_choose = (1..=j)
                        .map(|i| ((n - j + i) as f64 / i as f64).ln())
                        .sum::<f64>();
                    (ln_choose + j as f64 * p.ln() + (n - j) as f64 * (1.0 - p).ln()).exp()
                })
                .sum()
        };
        let at_most = |p: f64| {
            1.0 - at_least(p) + {
                let ln_choose = (1..=k)
                    .map(|i| ((n - k + i) as f64 / i as f64).ln())
                    .sum::<f64>();
                (ln_choose + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp()
            }
        };
        assert!((at_least(ci.lower) - 0.05).abs() < 1e-7);
        assert!((at_most(ci.upper) - 0.05).abs() < 1e-7);
        assert!(ci.lower < k as f64 / n as f64 && (k as f64 / n as f64) < ci.upper);
    }

    #[test]
    fn interval_rejects_bad_input() {
        assert!(clopper_pearson(3, 2, 0.95).is_err());
        assert!(clopper_pearson(1, 2, 1.0).is_err());
        assert_eq!(clopper_pearson(0, 0, 0.95).unwrap().upper, 1.0);
    }

    #[test]
    fn parallel_runs_match_serial_runs() {
        let spec = LinearSpec::scalar(3);
        let oracle = Oracle::scalar(DomainParams::new(10).unwrap(), |x: &[BigUint]| {
            let v = BigInt::from(3) * BigInt::from(x[0].clone());
            Ok(if x[0].bit(0) && x[0].bit(1) { v + 1 } else { v })
        });
        let budget = Budget::for_epsilon(Ratio::new(1, 8)).unwrap();
        let run = |rng: &mut TestRng| Ok((self_test(&spec, &oracle, &budget, rng)?, None));
        let serial = run_trials(40, 99, None, run).unwrap();
        let parallel = run_trials(40, 99, Some(3), run).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial[5].seed, 99 ^ 5);
        let again = self_test(&spec, &oracle, &budget, &mut rng_from_seed(99 ^ 7)).unwrap();
        assert_eq!(serial[7].verdict, again);
        let summary = Summary::from_records(&serial, 0.95).unwrap();
        assert_eq!(summary.trials, 40);
        assert!(summary.failures > 30);
    }

    #[test]
    fn estimators_on_correct_program() {
        let spec = LinearSpec::vector(vec![BigInt::from(2), BigInt::from(5)]).unwrap();
        let oracle = Oracle::linear(VectorDomainParams::new(6, 2).unwrap(), spec.clone());
        let mut rng = rng_from_seed(1);
        let p = estimate_pairing_fail(&spec, &oracle, 500, &mut rng).unwrap();
        let s = estimate_split_fail(&spec, &oracle, None, 500, &mut rng).unwrap();
        assert_eq!((p.failures, s.failures), (0, 0));
        assert_eq!(p.deviation_from(0.0), 0.0);
        assert!(estimate_pairing_fail(&spec, &oracle, 0, &mut rng).is_err());
    }
}
