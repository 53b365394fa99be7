//! Run configurations and the reports they produce.
//!
//! A [`RunConfig`] names one command and its parameters; [`run`] executes it
//! and returns a [`RunReport`] that serializes to a canonical JSON document.
//! The `lintest` binary is a thin argument parser over this module.

mod report;

use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

pub use report::{RunReport, SCHEMA_VERSION};

use crate::adversaries::{materialize, Adversary, FaultSpec, Sites};
use crate::analysis::{analyze, AnalysisParams, ScanLimits};
use crate::campaign::{run_trials, Summary};
use crate::domain::{LinearSpec, VectorDomainParams};
use crate::error::{Error, Result};
use crate::ratio::Ratio;
use crate::testers::{
    calibrate, check_input, checker_epsilon, general_linear_test, hom_self_test, self_test, Budget,
    Calibration,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Self-test a scalar program against `f(x) = b·x`.
    Selftest,
    /// Test whether a scalar program is linear at all, learning `b`.
    Proptest,
    /// Self-test a vector program against `x ↦ Σ bᵢxᵢ`.
    Homtest,
    /// Check the program's answer at one input.
    Check,
    /// Exact small-domain analysis.
    Analyze,
    /// Derive loop counts.
    Calibrate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Proptest => "proptest",
            Command::Homtest => "homtest",
            Command::Check => "check",
            Command::Analyze => "analyze",
            Command::Calibrate => "calibrate",
        }
    }
}

fn default_bits() -> u32 {
    16
}
fn default_dim() -> usize {
    1
}
fn default_b() -> Vec<BigInt> {
    vec![BigInt::from(1)]
}
fn default_epsilon() -> Ratio {
    Ratio::new(1, 8)
}
fn default_alpha() -> Ratio {
    Ratio::new(2, 3)
}
fn default_target() -> Ratio {
    Ratio::new(7, 8)
}
fn default_trials() -> u64 {
    1
}
fn default_confidence() -> f64 {
    0.95
}

/// Everything needed to reproduce one run. Rationals are `"p/q"` strings
/// and big integers are decimal strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default = "default_bits")]
    pub n: u32,
    #[serde(default = "default_dim")]
    pub m: usize,
    #[serde(default = "default_b", with = "crate::ratio::vec_bigint_str")]
    pub b: Vec<BigInt>,
    #[serde(default = "default_epsilon")]
    pub epsilon: Ratio,
    #[serde(default = "default_alpha")]
    pub alpha: Ratio,
    /// Defaults to `ε/4`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Ratio>,
    /// Per-loop detection probability the budget is derived for.
    #[serde(default = "default_target")]
    pub target_confidence: Ratio,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k1: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k2: Option<u64>,
    #[serde(default = "FaultSpec::correct")]
    pub fault: FaultSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// The input `check` verifies.
    #[serde(
        default,
        with = "opt_biguint_str",
        skip_serializing_if = "Option::is_none"
    )]
    pub input: Option<BigUint>,
    /// Confidence level of the reported FAIL-rate interval.
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    /// Worker threads for trials; results do not depend on it.
    #[serde(default, skip_serializing)]
    pub parallel: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan_bits: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_scan_bits: Option<u64>,
    #[serde(default, skip_serializing)]
    pub output_path: Option<String>,
}

mod opt_biguint_str {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.trim().parse().map_err(D::Error::custom))
            .transpose()
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n: default_bits(),
            m: default_dim(),
            b: default_b(),
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            beta: None,
            target_confidence: default_target(),
            k1: None,
            k2: None,
            fault: FaultSpec::correct(),
            seed: 0,
            trials: default_trials(),
            input: None,
            confidence: default_confidence(),
            parallel: None,
            scan_bits: None,
            pair_scan_bits: None,
            output_path: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn beta(&self) -> Ratio {
        self.beta
            .clone()
            .unwrap_or_else(|| &self.epsilon / &Ratio::new(4, 1))
    }

    /// Scan limits from the environment, overridden by the config.
    pub fn scan_limits(&self) -> ScanLimits {
        let mut limits = ScanLimits::from_env();
        if let Some(b) = self.scan_bits {
            limits.single_bits = b;
        }
        if let Some(b) = self.pair_scan_bits {
            limits.pair_bits = b;
        }
        limits
    }

    pub fn linear(&self) -> Result<LinearSpec> {
        if self.b.len() != self.m {
            return Err(Error::Config(format!(
                "{} coefficient(s) given for dimension m={}",
                self.b.len(),
                self.m
            )));
        }
        LinearSpec::vector(self.b.clone())
    }

    pub fn domain(&self) -> Result<VectorDomainParams> {
        VectorDomainParams::new(self.n, self.m)
    }

    /// The calibration behind the budget, before any `k1`/`k2` override.
    pub fn calibration(&self) -> Result<Calibration> {
        calibrate(
            &self.epsilon,
            &self.beta(),
            &self.alpha,
            &self.target_confidence,
        )
    }

    /// The loop counts in effect.
    pub fn budget(&self) -> Result<Budget> {
        if self.command == Command::Check {
            return Budget::for_epsilon(checker_epsilon());
        }
        let derived = match (self.k1, self.k2) {
            (Some(_), Some(_)) => None,
            _ => Some(self.calibration()?.budget),
        };
        let pick = |k: Option<u64>, f: fn(&Budget) -> u64| {
            k.unwrap_or_else(|| f(derived.as_ref().unwrap()))
        };
        Budget::new(
            pick(self.k1, |b| b.k1),
            pick(self.k2, |b| b.k2),
            self.epsilon.clone(),
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::Config(format!(
                "confidence {} is not in (0, 1)",
                self.confidence
            )));
        }
        if self.command == Command::Calibrate {
            return self.calibration().map(|_| ());
        }
        self.domain()?;
        self.linear()?;
        self.budget()?;
        let scalar_only = matches!(
            self.command,
            Command::Selftest | Command::Proptest | Command::Check
        );
        if scalar_only && self.m != 1 {
            return Err(Error::Config(format!(
                "{} works on scalar programs; use homtest for m={}",
                self.command.name(),
                self.m
            )));
        }
        if self.command == Command::Check && self.input.is_none() {
            return Err(Error::Config("check needs an input".into()));
        }
        Ok(())
    }

    fn adversary(&self) -> Result<Adversary> {
        materialize(&self.fault, &self.linear()?, self.domain()?)
    }
}

/// Executes `config`. Verdicts, PASS or FAIL, are data in the report; only
/// invalid configurations and oracle errors are errors.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    config.validate()?;
    let mut report = RunReport::new(config.clone());

    if config.command == Command::Calibrate {
        report.calibration = Some(config.calibration()?);
        report.budget = Some(config.budget()?);
        report.finish(start);
        return Ok(report);
    }

    let spec = config.linear()?;
    let adversary = config.adversary()?;
    let budget = config.budget()?;
    report.adversary = Some(adversary.report.clone());
    if config.command != Command::Check && (config.k1.is_none() || config.k2.is_none()) {
        report.calibration = Some(config.calibration()?);
    }
    report.budget = Some(budget.clone());
    let oracle = &adversary.oracle;

    let records = match config.command {
        Command::Selftest => run_trials(config.trials, config.seed, config.parallel, |rng| {
            Ok((self_test(&spec, oracle, &budget, rng)?, None))
        })?,
        Command::Proptest => run_trials(config.trials, config.seed, config.parallel, |rng| {
            general_linear_test(oracle, &budget, rng)
        })?,
        Command::Homtest => run_trials(config.trials, config.seed, config.parallel, |rng| {
            Ok((hom_self_test(&spec, oracle, &budget, rng)?, None))
        })?,
        Command::Check => {
            let a = config.input.clone().expect("validated");
            run_trials(config.trials, config.seed, config.parallel, |rng| {
                Ok((check_input(&a, &spec, oracle, rng)?, None))
            })?
        }
        Command::Analyze => {
            let params = AnalysisParams::new(config.beta(), config.alpha.clone())?;
            let limits = config.scan_limits();
            report.analysis = Some(analyze(&spec, oracle, &params, Some(&budget), &limits)?);
            report.finish(start);
            return Ok(report);
        }
        Command::Calibrate => unreachable!(),
    };
    report.summary = Some(Summary::from_records(&records, config.confidence)?);
    report.trials = records;
    report.finish(start);
    Ok(report)
}

/// Points a seeded fault spec at `seed`; explicit site lists are left alone.
pub fn with_fault_seed(mut spec: FaultSpec, seed: u64) -> FaultSpec {
    if let Sites::Seeded(_) = spec.sites {
        spec.sites = Sites::Seeded(seed);
    }
    spec
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversaries::FaultKind;

    #[test]
    fn defaults_fill_a_minimal_config() {
        let c = RunConfig::from_json(r#"{"command":"selftest"}"#).unwrap();
        assert_eq!(c, RunConfig::new(Command::Selftest));
        assert_eq!(c.beta(), Ratio::new(1, 32));
        assert_eq!(
            c.budget().unwrap(),
            Budget::new(96, 709, Ratio::new(1, 8)).unwrap()
        );
    }

    #[test]
    fn config_round_trips() {
        let mut c = RunConfig::new(Command::Homtest);
        c.m = 2;
        c.b = vec![BigInt::from(3), BigInt::from(-4)];
        c.fault = FaultSpec::new(FaultKind::RandomAdditive, Some(Ratio::new(1, 4)), 2);
        c.k1 = Some(10);
        c.seed = u64::MAX;
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(RunConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            r#"{"command":"selftest","trials":0}"#,
            r#"{"command":"selftest","m":2,"b":["1","2"]}"#,
            r#"{"command":"homtest","m":2}"#,
            r#"{"command":"check"}"#,
            r#"{"command":"selftest","epsilon":"2/3"}"#,
            r#"{"command":"selftest","n":0}"#,
            r#"{"command":"bogus"}"#,
            r#"{"command":"selftest","unknown":1}"#,
        ];
        for text in bad {
            let err = RunConfig::from_json(text).and_then(|c| run(&c));
            assert!(err.is_err(), "{text}");
        }
        let mut c = RunConfig::new(Command::Analyze);
        c.n = 24;
        assert!(matches!(run(&c), Err(Error::DomainTooLarge { .. })));
        let mut c = RunConfig::new(Command::Selftest);
        c.n = 8;
        c.fault = FaultSpec::new(FaultKind::RandomAdditive, Some(Ratio::new(1, 3)), 1);
        assert!(matches!(run(&c), Err(Error::UnrealizableFraction { .. })));
    }

    #[test]
    fn budget_overrides() {
        let mut c = RunConfig::new(Command::Selftest);
        c.k2 = Some(5);
        assert_eq!((c.budget().unwrap().k1, c.budget().unwrap().k2), (96, 5));
        c.command = Command::Check;
        assert_eq!(c.budget().unwrap().k2, 709);
    }

    #[test]
    fn fault_seed_only_touches_seeded_sites() {
        let s = with_fault_seed(FaultSpec::new(FaultKind::ParityOffset, None, 1), 4);
        assert_eq!(s.sites, Sites::Seeded(4));
        let p = with_fault_seed(FaultSpec::single_point(vec![3], 1), 4);
        assert_eq!(p.sites, Sites::Explicit(vec![vec![3]]));
    }
}
