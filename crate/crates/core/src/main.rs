use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_bigint::{BigInt, BigUint};

use lintest::adversaries::FaultSpec;
use lintest::analysis::{PAIR_SCAN_BITS_ENV, SCAN_BITS_ENV};
use lintest::cli::{run, with_fault_seed, Command, RunConfig};
use lintest::ratio::Ratio;

/// Randomized testing of programs that claim to compute linear functions.
///
/// Reports are JSON on stdout, or in the file given by --output with a
/// one-line summary on stdout. FAIL verdicts are results, not errors: the
/// exit status is nonzero only for bad configurations and oracle errors.
#[derive(Parser)]
#[command(name = "lintest", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Self-test against f(x) = b*x on n-bit inputs
    Selftest(Opts),
    /// Test for linearity without a reference coefficient
    Proptest(Opts),
    /// Self-test a linear map on m-dimensional vectors of n-bit integers
    Homtest(Opts),
    /// Check the program's answer at --input
    Check(Opts),
    /// Exact analysis of the faulty program by enumeration
    Analyze(Opts),
    /// Derive loop counts for --epsilon
    Calibrate(Opts),
    /// Run a JSON configuration file
    Run {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        parallel: Option<usize>,
    },
}

#[derive(Args)]
struct Opts {
    /// Bits per coordinate
    #[arg(long, default_value_t = 16)]
    n: u32,
    /// Vector dimension
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Coefficients, comma separated (one per dimension)
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1"
    )]
    b: Vec<BigInt>,
    /// Closeness parameter, as p/q or a decimal
    #[arg(long, default_value = "1/8")]
    epsilon: Ratio,
    #[arg(long, default_value = "2/3")]
    alpha: Ratio,
    /// Defaults to epsilon/4
    #[arg(long)]
    beta: Option<Ratio>,
    /// Per-loop detection probability the budget is derived for
    #[arg(long, default_value = "7/8")]
    target: Ratio,
    /// Override the pairing-loop count
    #[arg(long)]
    k1: Option<u64>,
    /// Override the split-loop count
    #[arg(long)]
    k2: Option<u64>,
    /// kind[:fraction[:magnitude]], e.g. random-additive:1/4:1
    #[arg(long, default_value = "correct", allow_hyphen_values = true)]
    fault: String,
    /// Fault spec as a JSON file (for explicit site lists)
    #[arg(long, conflicts_with = "fault")]
    fault_file: Option<PathBuf>,
    /// Seed for the fault sites
    #[arg(long, default_value_t = 0)]
    fault_seed: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// The input `check` verifies
    #[arg(long)]
    input: Option<BigUint>,
    /// Confidence of the FAIL-rate interval
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads
    #[arg(long)]
    parallel: Option<usize>,
    /// Largest domain (total bits) for single scans
    #[arg(long, env = SCAN_BITS_ENV)]
    scan_bits: Option<u64>,
    /// Largest domain (total bits) for pair scans
    #[arg(long, env = PAIR_SCAN_BITS_ENV)]
    pair_scan_bits: Option<u64>,
}

impl Opts {
    fn into_config(self, command: Command) -> Result<RunConfig> {
        let fault = match &self.fault_file {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<FaultSpec>(&text)
                    .with_context(|| format!("parsing fault spec {}", path.display()))?
            }
            None => with_fault_seed(FaultSpec::parse_compact(&self.fault)?, self.fault_seed),
        };
        Ok(RunConfig {
            n: self.n,
            m: self.m,
            b: self.b,
            epsilon: self.epsilon,
            alpha: self.alpha,
            beta: self.beta,
            target_confidence: self.target,
            k1: self.k1,
            k2: self.k2,
            fault,
            seed: self.seed,
            trials: self.trials,
            input: self.input,
            confidence: self.confidence,
            parallel: self.parallel,
            scan_bits: self.scan_bits,
            pair_scan_bits: self.pair_scan_bits,
            output_path: self.output.map(|p| p.display().to_string()),
            ..RunConfig::new(command)
        })
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(cli: Cli) -> Result<()> {
    let config = match cli.command {
        Cmd::Selftest(o) => o.into_config(Command::Selftest)?,
        Cmd::Proptest(o) => o.into_config(Command::Proptest)?,
        Cmd::Homtest(o) => o.into_config(Command::Homtest)?,
        Cmd::Check(o) => o.into_config(Command::Check)?,
        Cmd::Analyze(o) => o.into_config(Command::Analyze)?,
        Cmd::Calibrate(o) => o.into_config(Command::Calibrate)?,
        Cmd::Run {
            config,
            output,
            parallel,
        } => {
            let text = std::fs::read_to_string(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            let mut c = RunConfig::from_json(&text)?;
            if let Some(o) = output {
                c.output_path = Some(o.display().to_string());
            }
            if parallel.is_some() {
                c.parallel = parallel;
            }
            c
        }
    };
    if config.parallel == Some(0) {
        bail!("--parallel needs at least one worker");
    }
    let report = run(&config)?;
    let json = report.to_json();
    let stdout = match &config.output_path {
        Some(path) => {
            std::fs::write(path, json + "\n").with_context(|| format!("writing {path}"))?;
            report.headline()
        }
        None => json,
    };
    // A closed pipe (`lintest ... | head`) is not an error.
    match writeln!(std::io::stdout().lock(), "{stdout}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.context("writing to stdout"),
    }
}
