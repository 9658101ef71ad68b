//! Command-line and config-file schema. Every experiment struct is both a
//! clap argument group and a serde record, so `run --config` accepts exactly
//! the flags the subcommands do (kebab-case keys, unknown keys rejected).

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "prubench", version, about = "Seeded experiments on pseudorandom-unitary ensembles")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Master seed; required by stochastic experiments.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report destination (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Cap on any single dense materialization, in bytes (K, M, G suffixes allowed).
    #[arg(long, global = true, value_parser = parse_bytes)]
    pub mem_budget: Option<u64>,
    /// Sweep one parameter: `name=v1,v2,...`, one report per value.
    #[arg(long, global = true)]
    pub sweep: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Experiment(Experiment),
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// A `run --config` file. Command-line globals override the file's values.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub mem_budget: Option<u64>,
    #[serde(default)]
    pub sweep: Option<String>,
    pub experiment: Experiment,
}

#[derive(Debug, Clone, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    /// Collision distinguisher: PFC ensemble against Haar states.
    PfcDistinguish(PfcDistinguishArgs),
    /// Moment-operator distances of a finite ensemble from Haar.
    DesignDistance(DesignDistanceArgs),
    /// Monte Carlo exposure of a net.
    NetCoverage(NetCoverageArgs),
    /// Exact truncation error of a diagonal-oracle circuit.
    TruncateDiag(TruncateDiagArgs),
    /// Closed-form bound calculators.
    Bounds {
        #[command(subcommand)]
        formula: Formula,
    },
    /// Process tomography of a Haar-random hidden unitary.
    TomoDemo(TomoDemoArgs),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PfcDistinguish(_) => "pfc-distinguish",
            Experiment::DesignDistance(_) => "design-distance",
            Experiment::NetCoverage(_) => "net-coverage",
            Experiment::TruncateDiag(_) => "truncate-diag",
            Experiment::Bounds { .. } => "bounds",
            Experiment::TomoDemo(_) => "tomo-demo",
        }
    }

    pub fn is_stochastic(&self) -> bool {
        matches!(self, Experiment::PfcDistinguish(_) | Experiment::NetCoverage(_) | Experiment::TomoDemo(_))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PfcDistinguishArgs {
    /// Qubits; the dimension is `2^n`.
    #[arg(long)]
    pub n: u32,
    /// Copies per block (default `⌈√d⌉`).
    #[arg(long)]
    #[serde(default)]
    pub t: Option<u64>,
    /// Blocks per run (default 1000).
    #[arg(long)]
    #[serde(default)]
    pub k_blocks: Option<u64>,
    /// Threshold parameter (default 1/4).
    #[arg(long)]
    #[serde(default)]
    pub alpha: Option<f64>,
    /// Hidden unitaries drawn per side (default 200).
    #[arg(long)]
    #[serde(default)]
    pub trials: Option<u64>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub estimator: Option<Estimator>,
    /// Exit with status 2 when the measured advantage is below this.
    #[arg(long)]
    #[serde(default)]
    pub min_advantage: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Mean,
    Median,
}

#[derive(Debug, Clone, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct DesignDistanceArgs {
    /// Ensemble manifest (JSON).
    #[arg(long, required_unless_present = "reference", conflicts_with = "reference")]
    #[serde(default)]
    pub ensemble: Option<PathBuf>,
    /// Built-in exact design instead of a manifest.
    #[arg(long, value_enum)]
    #[serde(default)]
    pub reference: Option<Reference>,
    /// Moment order.
    #[arg(long)]
    pub t: u32,
    /// Draws taken from a generated (sampler) manifest (default 64).
    #[arg(long)]
    #[serde(default)]
    pub samples: Option<usize>,
    /// Exit with status 2 when the TPE distance exceeds this.
    #[arg(long)]
    #[serde(default)]
    pub max_lambda: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    /// Single-qubit Pauli group.
    Pauli1,
    /// Two-qubit Pauli group.
    Pauli2,
    /// The 24 single-qubit Cliffords.
    Clifford1,
}

#[derive(Debug, Clone, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct NetCoverageArgs {
    /// Net manifest (JSON).
    #[arg(long)]
    pub net: PathBuf,
    #[arg(long)]
    pub eps: f64,
    /// Haar samples (default 10000).
    #[arg(long)]
    #[serde(default)]
    pub samples: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct TruncateDiagArgs {
    /// Circuit manifest (JSON).
    #[arg(long)]
    pub circuit: PathBuf,
    /// Fractional bits kept per phase.
    #[arg(long)]
    pub k: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, Args)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct TomoDemoArgs {
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub eta: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, Subcommand)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum Formula {
    /// `max{(1−δ)C(d+t−1,t)², d^{2t}/((1+δ)t!)}`.
    PriorSupport {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 0.0)]
        #[serde(default)]
        delta: f64,
    },
    /// Support-size lower bound growing like `t^{(d²−1)/2}`.
    ImprovedSupport {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        #[serde(default)]
        delta: f64,
        /// Unspecified constant, placeholder 1.
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "one")]
        c_design: f64,
    },
    /// Oracle input-length lower bounds.
    InputLength {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 0.0)]
        #[serde(default)]
        delta: f64,
        #[arg(long)]
        epsilon: f64,
        /// Unspecified additive constant, placeholder 1.
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "one")]
        slack: f64,
    },
    /// Parameters of the support-enumeration construction with `t = 2^κ`.
    TrivialRompru {
        #[arg(long)]
        d: u64,
        #[arg(long)]
        kappa: u32,
    },
    /// `(1 − η)(c⋄/ε)^{d²−1}`.
    NetSize {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        eta: f64,
        /// Unspecified constant, placeholder 1.
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "one")]
        c_diamond: f64,
    },
    /// Binary input length after truncating `s` calls to `m`-bit oracles.
    BinaryInputLength {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        calls: u64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        #[serde(default = "one")]
        c: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn parse_bytes(s: &str) -> Result<u64, String> {
    let (digits, shift) = match s.as_bytes().last() {
        Some(b'K' | b'k') => (&s[..s.len() - 1], 10),
        Some(b'M' | b'm') => (&s[..s.len() - 1], 20),
        Some(b'G' | b'g') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let n: u64 = digits.parse().map_err(|e| format!("{s:?}: {e}"))?;
    n.checked_mul(1 << shift).ok_or_else(|| format!("{s:?} overflows 64 bits"))
}
