//! Flags shared between subcommands and the usage-error type.

use clap::Args;
use embcol::ffield::PrimeModulus;
use embcol::graphs::PatternGraph;
use embcol::oracle::OracleSpec;

/// A usage error names the flag at fault; it maps to exit status 2.
#[derive(Debug)]
pub struct UsageError {
    pub flag: &'static str,
    pub message: String,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.flag, self.message)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(flag: &'static str, message: impl Into<String>) -> anyhow::Error {
    UsageError { flag, message: message.into() }.into()
}

/// Trial count, seed and thread count of a statistical subcommand.
#[derive(Args, Clone, Debug)]
pub struct StatArgs {
    /// Master seed; required, since every trial stream derives from it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 20)]
    pub trials: u64,
    /// Worker threads for independent trials (default: all cores).
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl StatArgs {
    pub fn seed(&self) -> anyhow::Result<u64> {
        require_seed(self.seed)
    }

    pub fn jobs(&self) -> usize {
        self.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
    }
}

pub fn require_seed(seed: Option<u64>) -> anyhow::Result<u64> {
    seed.ok_or_else(|| usage("--seed", "required for randomized subcommands"))
}

pub fn parse_pattern(s: &str) -> Result<PatternGraph, String> {
    PatternGraph::parse(s).map_err(|e| e.to_string())
}

pub fn parse_oracle(s: &str) -> Result<OracleSpec, String> {
    OracleSpec::parse(s).map_err(|e| e.to_string())
}

pub fn parse_prime(s: &str) -> Result<PrimeModulus, String> {
    let q: u64 = s.parse().map_err(|e| format!("{e}"))?;
    PrimeModulus::new(q).map_err(|e| e.to_string())
}

pub fn parse_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}
