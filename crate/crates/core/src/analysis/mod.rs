//! Exact probabilities by enumeration on small domains.
//!
//! Everything here is computed from the program's full discrepancy table
//! `d(x) = P(x) - f(x)`: the sign profile, opposite-sign match counts, and
//! the exact per-iteration failure probabilities of both tester loops. The
//! testers' checks reduce to identities on `d`: a pairing check at `x`
//! fails iff `d(x) + d(-x mod 2ⁿ) ≠ 0`, and a split `(x₁, x - x₁ mod 2ⁿ)`
//! fails iff `d(x₁) + d(x - x₁) ≠ d(x)`. Vector domains are handled by
//! flattening points to `m·n`-bit indices with coordinate-wise arithmetic.
//!
//! Probabilities and thresholds are exact rationals.

mod chernoff;
mod report;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

pub use chernoff::{certificate, chernoff_trials, miss_bound, ChernoffQuery, CERTIFICATE_SLACK};
pub use report::{analyze, AnalysisReport, BoundCheck};

use crate::adversaries::{index_of_point, negate_flat, point_of_index};
use crate::domain::{LinearSpec, VectorDomainParams};
use crate::error::{Error, Result};
use crate::oracle::Oracle;
use crate::ratio::Ratio;
use crate::testers::Budget;

/// Environment variable overriding [`ScanLimits::single_bits`].
pub const SCAN_BITS_ENV: &str = "LINTEST_SCAN_BITS";
/// Environment variable overriding [`ScanLimits::pair_bits`].
pub const PAIR_SCAN_BITS_ENV: &str = "LINTEST_PAIR_SCAN_BITS";

/// Largest domains (in flattened bits) the exhaustive scans accept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScanLimits {
    /// Linear scans over the domain.
    pub single_bits: u64,
    /// Quadratic scans over pairs of points.
    pub pair_bits: u64,
}

impl Default for ScanLimits {
    fn default() -> Self {
        ScanLimits {
            single_bits: 20,
            pair_bits: 14,
        }
    }
}

impl ScanLimits {
    /// Defaults overridden by `LINTEST_SCAN_BITS` / `LINTEST_PAIR_SCAN_BITS`.
    pub fn from_env() -> Self {
        let read = |key: &str, default: u64| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(default)
        };
        let d = ScanLimits::default();
        ScanLimits {
            single_bits: read(SCAN_BITS_ENV, d.single_bits),
            pair_bits: read(PAIR_SCAN_BITS_ENV, d.pair_bits),
        }
    }

    fn check(limit: u64, domain: &VectorDomainParams) -> Result<()> {
        if domain.total_bits() > limit || domain.total_bits() > 32 {
            return Err(Error::DomainTooLarge {
                bits: domain.total_bits(),
                limit: limit.min(32),
            });
        }
        Ok(())
    }
}

/// Tuning of the good/bad classification: `β` bounds the sign imbalance the
/// pairing loop tolerates, `α` the Markov threshold.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisParams {
    pub beta: Ratio,
    pub alpha: Ratio,
}

impl AnalysisParams {
    pub fn new(beta: Ratio, alpha: Ratio) -> Result<Self> {
        if !beta.is_positive() {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        if !alpha.is_positive() || alpha >= Ratio::one() {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(AnalysisParams { beta, alpha })
    }

    /// `β = ε/4`, `α = 2/3`.
    pub fn for_epsilon(epsilon: &Ratio) -> Self {
        AnalysisParams {
            beta: epsilon / &Ratio::new(4, 1),
            alpha: Ratio::new(2, 3),
        }
    }
}

/// `d(x) = P(x) - f(x)`.
pub fn discrepancy(x: &[BigUint], spec: &LinearSpec, oracle: &Oracle) -> Result<BigInt> {
    Ok(oracle.evaluate(x)? - spec.eval(x)?)
}

/// Counts of zero, positive and negative discrepancies over the domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscrepancyProfile {
    pub bits: u32,
    pub dim: usize,
    pub num_zero: u64,
    pub num_positive: u64,
    pub num_negative: u64,
    pub epsilon0: Ratio,
    pub epsilon1: Ratio,
    pub epsilon2: Ratio,
}

/// Opposite-sign matches at one `x`: the `x₁` with `d(x₁) > 0` and
/// `d(x - x₁ mod 2ⁿ) < 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OppositeSignReport {
    pub x: Vec<String>,
    pub match_count: u64,
    pub is_good: bool,
    pub alpha: Ratio,
    /// `(1/α)(ε₀/2)²·|D|`.
    pub threshold: Ratio,
}

#[derive(Debug, Clone)]
enum Values {
    /// Every discrepancy fits in an `i64`; sums are taken in `i128`.
    Small(Vec<i64>),
    Big(Vec<BigInt>),
}

/// The full discrepancy table of a program on a small domain.
#[derive(Debug, Clone)]
pub struct DiscrepancyTable {
    domain: VectorDomainParams,
    values: Values,
}

impl DiscrepancyTable {
    /// Queries the oracle at every point of its domain.
    pub fn scan(spec: &LinearSpec, oracle: &Oracle, limits: &ScanLimits) -> Result<Self> {
        let domain = oracle.domain();
        domain.check_dim(spec.dim())?;
        ScanLimits::check(limits.single_bits, &domain)?;
        let size = 1u64 << domain.total_bits();
        let mut big = Vec::with_capacity(size as usize);
        for idx in 0..size {
            let x = point_of_index(idx, &domain);
            big.push(discrepancy(&x, spec, oracle)?);
        }
        Ok(Self::from_values(domain, big))
    }

    /// A table from explicit values indexed by flattened point.
    pub fn from_values(domain: VectorDomainParams, values: Vec<BigInt>) -> Self {
        assert_eq!(values.len() as u64, 1u64 << domain.total_bits());
        let small: Option<Vec<i64>> = values.iter().map(|v| v.to_i64()).collect();
        let values = match small {
            Some(v) => Values::Small(v),
            None => Values::Big(values),
        };
        DiscrepancyTable { domain, values }
    }

    pub fn domain(&self) -> VectorDomainParams {
        self.domain
    }

    pub fn size(&self) -> u64 {
        1u64 << self.domain.total_bits()
    }

    fn sign(&self, idx: u64) -> i32 {
        match &self.values {
            Values::Small(v) => v[idx as usize].signum() as i32,
            Values::Big(v) => {
                let s = &v[idx as usize];
                if s.is_positive() {
                    1
                } else if s.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn value(&self, idx: u64) -> BigInt {
        match &self.values {
            Values::Small(v) => BigInt::from(v[idx as usize]),
            Values::Big(v) => v[idx as usize].clone(),
        }
    }

    /// Whether `d(a) + d(b) = d(c)`.
    fn additive(&self, a: u64, b: u64, c: u64) -> bool {
        match &self.values {
            Values::Small(v) => {
                i128::from(v[a as usize]) + i128::from(v[b as usize]) == i128::from(v[c as usize])
            }
            Values::Big(v) => &v[a as usize] + &v[b as usize] == v[c as usize],
        }
    }

    /// Coordinate-wise `(a - b) mod 2ⁿ`.
    fn sub(&self, a: u64, b: u64) -> u64 {
        let bits = self.domain.bits();
        let mask = (1u64 << bits) - 1;
        if self.domain.dim() == 1 {
            return a.wrapping_sub(b) & mask;
        }
        let mut out = 0;
        for i in 0..self.domain.dim() {
            let s = i as u32 * bits;
            out |= ((a >> s).wrapping_sub(b >> s) & mask) << s;
        }
        out
    }

    fn neg(&self, a: u64) -> u64 {
        negate_flat(a, self.domain.bits(), self.domain.dim())
    }

    pub fn index_of(&self, x: &[BigUint]) -> Result<u64> {
        if !self.domain.contains(x) {
            return Err(Error::InvalidDomain(format!(
                "{} is not a point of the analysed domain",
                crate::domain::format_point(x)
            )));
        }
        Ok(index_of_point(x, self.domain.bits()))
    }

    pub fn profile(&self) -> DiscrepancyProfile {
        let (mut zero, mut pos, mut neg) = (0u64, 0u64, 0u64);
        for idx in 0..self.size() {
            match self.sign(idx) {
                0 => zero += 1,
                1 => pos += 1,
                _ => neg += 1,
            }
        }
        let n = self.size() as i64;
        DiscrepancyProfile {
            bits: self.domain.bits(),
            dim: self.domain.dim(),
            num_zero: zero,
            num_positive: pos,
            num_negative: neg,
            epsilon0: Ratio::new((pos + neg) as i64, n),
            epsilon1: Ratio::new(pos as i64, n),
            epsilon2: Ratio::new(neg as i64, n),
        }
    }

    /// Exact probability that one pairing iteration fails.
    pub fn pairing_fail_prob(&self) -> Ratio {
        let fails = (0..self.size())
            .filter(|&x| !self.pairs_to_zero(x, self.neg(x)))
            .count() as i64;
        Ratio::new(fails, self.size() as i64)
    }

    fn pairs_to_zero(&self, a: u64, b: u64) -> bool {
        match &self.values {
            Values::Small(v) => i128::from(v[a as usize]) + i128::from(v[b as usize]) == 0,
            Values::Big(v) => (&v[a as usize] + &v[b as usize]).is_zero(),
        }
    }

    /// Number of draws `x₁` for which the split check at `x` fails.
    pub fn split_failures_at(&self, x: u64) -> u64 {
        (0..self.size())
            .filter(|&x1| !self.additive(x1, self.sub(x, x1), x))
            .count() as u64
    }

    /// Exact probability that a split check at `x` fails.
    pub fn split_fail_prob_at(&self, x: u64) -> Ratio {
        Ratio::new(self.split_failures_at(x) as i64, self.size() as i64)
    }

    /// Exact probability that one split-loop iteration (uniform `x`, uniform
    /// `x₁`) fails.
    pub fn split_fail_prob_all(&self, limits: &ScanLimits) -> Result<Ratio> {
        ScanLimits::check(limits.pair_bits, &self.domain)?;
        let total: u64 = (0..self.size()).map(|x| self.split_failures_at(x)).sum();
        let n = BigInt::from(self.size());
        Ok(Ratio(BigRational::new(BigInt::from(total), &n * &n)))
    }

    /// Opposite-sign matches at `x` by a full scan over `x₁`.
    pub fn opposite_sign_matches(&self, x: u64) -> u64 {
        (0..self.size())
            .filter(|&x1| self.sign(x1) > 0 && self.sign(self.sub(x, x1)) < 0)
            .count() as u64
    }

    /// Match counts for every `x`.
    pub fn all_match_counts(&self, limits: &ScanLimits) -> Result<Vec<u64>> {
        ScanLimits::check(limits.pair_bits, &self.domain)?;
        Ok((0..self.size())
            .map(|x| self.opposite_sign_matches(x))
            .collect())
    }

    /// `(1/α)(ε₀/2)²·|D|`.
    pub fn good_threshold(&self, alpha: &Ratio) -> Ratio {
        let p = self.profile();
        let half = &p.epsilon0 / &Ratio::new(2, 1);
        &(&(&half * &half) / alpha) * &Ratio::from_integer(self.size())
    }

    pub fn opposite_sign_report(&self, x: u64, alpha: &Ratio) -> OppositeSignReport {
        let threshold = self.good_threshold(alpha);
        let match_count = self.opposite_sign_matches(x);
        OppositeSignReport {
            x: point_of_index(x, &self.domain)
                .iter()
                .map(|c| c.to_string())
                .collect(),
            match_count,
            is_good: Ratio::from_integer(match_count) <= threshold,
            alpha: alpha.clone(),
            threshold,
        }
    }
}

/// Which split-loop probability to compute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitTarget {
    At(Vec<BigUint>),
    All,
}

/// Exact discrepancy profile by a full scan of the domain.
pub fn profile(
    spec: &LinearSpec,
    oracle: &Oracle,
    limits: &ScanLimits,
) -> Result<DiscrepancyProfile> {
    Ok(DiscrepancyTable::scan(spec, oracle, limits)?.profile())
}

pub fn opposite_sign_report(
    x: &[BigUint],
    spec: &LinearSpec,
    oracle: &Oracle,
    alpha: &Ratio,
    limits: &ScanLimits,
) -> Result<OppositeSignReport> {
    let table = DiscrepancyTable::scan(spec, oracle, limits)?;
    let idx = table.index_of(x)?;
    Ok(table.opposite_sign_report(idx, alpha))
}

/// Exact probability that one pairing iteration fails.
pub fn exact_pairing_fail_prob(
    spec: &LinearSpec,
    oracle: &Oracle,
    limits: &ScanLimits,
) -> Result<Ratio> {
    Ok(DiscrepancyTable::scan(spec, oracle, limits)?.pairing_fail_prob())
}

/// Exact probability that one split check fails, at a fixed `x` or averaged
/// over uniform `x`.
pub fn exact_split_fail_prob(
    spec: &LinearSpec,
    oracle: &Oracle,
    target: &SplitTarget,
    limits: &ScanLimits,
) -> Result<Ratio> {
    let table = DiscrepancyTable::scan(spec, oracle, limits)?;
    match target {
        SplitTarget::At(x) => Ok(table.split_fail_prob_at(table.index_of(x)?)),
        SplitTarget::All => table.split_fail_prob_all(limits),
    }
}

/// Probability that a whole self-test run fails given the exact
/// per-iteration probabilities: every iteration draws fresh randomness, so
/// `1 - (1-p₁)^k₁ (1-p₂)^k₂`.
pub fn self_test_fail_prob(pairing: &Ratio, split: &Ratio, budget: &Budget) -> f64 {
    let keep1 = (1.0 - pairing.to_f64()).powf(budget.k1 as f64);
    let keep2 = (1.0 - split.to_f64()).powf(budget.k2 as f64);
    1.0 - keep1 * keep2
}

/// Distance from a scalar program to the nearest linear function `x ↦ b'x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinearDistance {
    /// A nearest coefficient, if any linear function agrees with the program
    /// at a nonzero point.
    #[serde(with = "crate::ratio::opt_bigint_str")]
    pub nearest: Option<BigInt>,
    pub agreements: u64,
    pub distance: Ratio,
}

/// Exact distance to the set of all linear functions.
///
/// A function `x ↦ b'x` can agree with `P` at `x ≠ 0` only if `x | P(x)`
/// and `b' = P(x)/x`, so counting these quotients covers every candidate;
/// every candidate also agrees at `0` iff `P(0) = 0`.
pub fn distance_to_linear(oracle: &Oracle, limits: &ScanLimits) -> Result<LinearDistance> {
    let domain = oracle.domain();
    domain.check_dim(1)?;
    ScanLimits::check(limits.single_bits, &domain)?;
    let size = 1u64 << domain.bits();
    let mut quotients: std::collections::HashMap<BigInt, u64> = std::collections::HashMap::new();
    let zero_agrees = oracle.evaluate(&[BigUint::zero()])?.is_zero();
    for x in 1..size {
        let px = oracle.evaluate(&[BigUint::from(x)])?;
        let (q, r) = px.div_mod_floor(&BigInt::from(x));
        if r.is_zero() {
            *quotients.entry(q).or_default() += 1;
        }
    }
    let best = quotients
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then_with(|| b.0.cmp(&a.0)));
    let (nearest, hits) = match best {
        Some((b, hits)) => (Some(b), hits),
        None => (None, 0),
    };
    let agreements = hits + u64::from(zero_agrees);
    Ok(LinearDistance {
        nearest,
        agreements,
        distance: Ratio::new((size - agreements) as i64, size as i64),
    })
}
