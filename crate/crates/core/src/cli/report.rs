use std::time::Instant;

use serde::Serialize;

use super::RunConfig;
use crate::adversaries::FaultReport;
use crate::analysis::AnalysisReport;
use crate::campaign::{Summary, TrialRecord};
use crate::testers::{Budget, Calibration};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;

/// The JSON document a run writes. Fields serialize in declaration order,
/// so identical runs give identical bytes apart from `wall_time_ms`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config: RunConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration: Option<Calibration>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budget: Option<Budget>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adversary: Option<FaultReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<Summary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub trials: Vec<TrialRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analysis: Option<AnalysisReport>,
    pub wall_time_ms: u64,
}

impl RunReport {
    pub(super) fn new(config: RunConfig) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            tool: env!("CARGO_PKG_NAME"),
            tool_version: env!("CARGO_PKG_VERSION"),
            config,
            calibration: None,
            budget: None,
            adversary: None,
            summary: None,
            trials: Vec::new(),
            analysis: None,
            wall_time_ms: 0,
        }
    }

    pub(super) fn finish(&mut self, start: Instant) {
        self.wall_time_ms = start.elapsed().as_millis() as u64;
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line for humans.
    pub fn headline(&self) -> String {
        let cmd = self.config.command.name();
        if let Some(s) = &self.summary {
            return format!(
                "{cmd}: {}/{} FAIL (rate {:.4}, {:.0}% CI [{:.4}, {:.4}]), {} queries",
                s.failures,
                s.trials,
                s.fail_rate,
                s.fail_rate_ci.confidence * 100.0,
                s.fail_rate_ci.lower,
                s.fail_rate_ci.upper,
                s.total_queries
            );
        }
        if let Some(a) = &self.analysis {
            let held = a.bound_checks.iter().filter(|c| c.holds).count();
            return format!(
                "{cmd}: eps0={} eps1={} eps2={}, pairing fail {}, {held}/{} bound checks hold",
                a.profile.epsilon0,
                a.profile.epsilon1,
                a.profile.epsilon2,
                a.pairing_fail_prob,
                a.bound_checks.len()
            );
        }
        if let Some(c) = &self.calibration {
            return format!(
                "{cmd}: k1={} k2={} p1={} p2={}",
                c.budget.k1, c.budget.k2, c.p1, c.p2
            );
        }
        cmd.to_string()
    }
}
