use serde::Serialize;

use super::{
    distance_to_linear, self_test_fail_prob, AnalysisParams, DiscrepancyProfile, DiscrepancyTable,
    LinearDistance, ScanLimits,
};
use crate::domain::LinearSpec;
use crate::error::Result;
use crate::oracle::Oracle;
use crate::ratio::Ratio;
use crate::testers::Budget;

/// One inequality (or identity) evaluated on a concrete program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: &'static str,
    pub relation: &'static str,
    pub lhs: Ratio,
    pub rhs: Ratio,
    pub holds: bool,
}

impl BoundCheck {
    fn eq(name: &'static str, lhs: Ratio, rhs: Ratio) -> Self {
        let holds = lhs == rhs;
        BoundCheck {
            name,
            relation: "==",
            lhs,
            rhs,
            holds,
        }
    }

    fn ge(name: &'static str, lhs: Ratio, rhs: Ratio) -> Self {
        let holds = lhs >= rhs;
        BoundCheck {
            name,
            relation: ">=",
            lhs,
            rhs,
            holds,
        }
    }

    fn le(name: &'static str, lhs: Ratio, rhs: Ratio) -> Self {
        let holds = lhs <= rhs;
        BoundCheck {
            name,
            relation: "<=",
            lhs,
            rhs,
            holds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub params: AnalysisParams,
    pub profile: DiscrepancyProfile,
    pub pairing_fail_prob: Ratio,
    /// Absent when the domain exceeds the pair-scan limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split_fail_prob: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub self_test_fail_prob: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub average_match_count: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_threshold: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_fraction: Option<Ratio>,
    /// Smallest split-failure probability over good `x`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_good_split_fail_prob: Option<Ratio>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub linear_distance: Option<LinearDistance>,
    pub bound_checks: Vec<BoundCheck>,
}

impl AnalysisReport {
    pub fn all_hold(&self) -> bool {
        self.bound_checks.iter().all(|c| c.holds)
    }

    pub fn check(&self, name: &str) -> Option<&BoundCheck> {
        self.bound_checks.iter().find(|c| c.name == name)
    }
}

/// Runs every exact analysis the scan limits allow and evaluates the
/// detection bounds on the result.
pub fn analyze(
    spec: &LinearSpec,
    oracle: &Oracle,
    params: &AnalysisParams,
    budget: Option<&Budget>,
    limits: &ScanLimits,
) -> Result<AnalysisReport> {
    let table = DiscrepancyTable::scan(spec, oracle, limits)?;
    let profile = table.profile();
    let size = Ratio::from_integer(table.size());
    let two = Ratio::new(2, 1);
    let half_eps0 = &profile.epsilon0 / &two;

    let mut checks = vec![BoundCheck::eq(
        "sign_fractions_sum_to_error_rate",
        profile.epsilon0.clone(),
        &profile.epsilon1 + &profile.epsilon2,
    )];

    let pairing = table.pairing_fail_prob();
    let imbalance = if profile.epsilon1 >= profile.epsilon2 {
        &profile.epsilon1 - &profile.epsilon2
    } else {
        &profile.epsilon2 - &profile.epsilon1
    };
    checks.push(BoundCheck::ge(
        "pairing_fail_at_least_sign_imbalance",
        pairing.clone(),
        imbalance,
    ));
    let low = &half_eps0 - &params.beta;
    let unbalanced = profile.epsilon1 <= low || profile.epsilon2 <= low;
    if unbalanced && !profile.epsilon0.is_zero() {
        checks.push(BoundCheck::ge(
            "pairing_fail_at_least_two_beta",
            pairing.clone(),
            &two * &params.beta,
        ));
    }

    let within_pairs = table.domain().total_bits() <= limits.pair_bits;
    let mut report = AnalysisReport {
        params: params.clone(),
        profile: profile.clone(),
        pairing_fail_prob: pairing,
        split_fail_prob: None,
        self_test_fail_prob: None,
        average_match_count: None,
        good_threshold: None,
        bad_fraction: None,
        min_good_split_fail_prob: None,
        linear_distance: None,
        bound_checks: Vec::new(),
    };

    if within_pairs {
        let split = table.split_fail_prob_all(limits)?;
        if let Some(b) = budget {
            report.self_test_fail_prob =
                Some(self_test_fail_prob(&report.pairing_fail_prob, &split, b));
        }
        report.split_fail_prob = Some(split);

        let counts = table.all_match_counts(limits)?;
        let total: u64 = counts.iter().sum();
        let average = &Ratio::from_integer(total) / &size;
        checks.push(BoundCheck::eq(
            "average_matches_equal_e1_e2_size",
            average.clone(),
            &(&profile.epsilon1 * &profile.epsilon2) * &size,
        ));
        checks.push(BoundCheck::le(
            "average_matches_at_most_quarter_e0_squared_size",
            average.clone(),
            &(&half_eps0 * &half_eps0) * &size,
        ));

        let threshold = table.good_threshold(&params.alpha);
        let bad = counts
            .iter()
            .filter(|&&c| Ratio::from_integer(c) > threshold)
            .count() as u64;
        let bad_fraction = &Ratio::from_integer(bad) / &size;
        checks.push(BoundCheck::le(
            "bad_fraction_at_most_alpha",
            bad_fraction.clone(),
            params.alpha.clone(),
        ));

        let high = &half_eps0 + &params.beta;
        let balanced = profile.epsilon1 > low
            && profile.epsilon1 < high
            && profile.epsilon2 > low
            && profile.epsilon2 < high;
        let min_good = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| Ratio::from_integer(c) <= threshold)
            .map(|(x, _)| table.split_failures_at(x as u64))
            .min()
            .map(|f| &Ratio::from_integer(f) / &size);
        if let (true, Some(m)) = (balanced, &min_good) {
            let bound = &low - &(&(&half_eps0 * &half_eps0) / &params.alpha);
            checks.push(BoundCheck::ge(
                "good_x_split_fail_at_least_bound",
                m.clone(),
                bound,
            ));
        }

        report.average_match_count = Some(average);
        report.good_threshold = Some(threshold);
        report.bad_fraction = Some(bad_fraction);
        report.min_good_split_fail_prob = min_good;
    }

    if table.domain().dim() == 1 {
        report.linear_distance = Some(distance_to_linear(oracle, limits)?);
    }
    report.bound_checks = checks;
    Ok(report)
}
