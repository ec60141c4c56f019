//! `ruin`: joint ruin probabilities of two correlated Brownian portfolios
//! from closed forms, asymptotics and simulation.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;
use ruin_core::RuinError;

#[derive(Parser, Debug)]
#[command(
    name = "ruin",
    version,
    about = "Finite-time joint ruin of two correlated Brownian portfolios",
    after_help = "Exit codes: 0 success, 2 invalid input, 3 numeric failure, 4 verification failure.\n\
                  RUIN_THREADS sets the worker count when --threads is absent."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Asymptotic regime of (rho, a).
    Classify {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long)]
        a: f64,
        #[command(flatten)]
        regimes: RegimeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Lower and upper bounds for rho in (0, 1); the exact product at rho = 0.
    Bounds {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Asymptotic approximation at capital u with v = a u.
    Approx {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        regimes: RegimeArgs,
        /// Regime to evaluate; must match the classification [default: classified]
        #[arg(long)]
        regime: Option<String>,
        /// C1 constant for FullDim_I [default: estimated by simulation over --delta]
        #[arg(long)]
        c1_constant: Option<f64>,
        /// Horizon for the simulated C1 constant
        #[arg(long, default_value_t = 8.0)]
        delta: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate of the joint ruin probability.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        tilt: TiltArgs,
        #[command(flatten)]
        regimes: RegimeArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Simulated Pickands-type constant C1 over [0, delta]^2.
    Pickands {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        #[arg(long)]
        a: f64,
        /// Horizons, comma separated
        #[arg(long, value_delimiter = ',', default_value = "8")]
        delta: Vec<f64>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Table of bounds, asymptotics and simulation along one parameter.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Axis values, comma separated and strictly monotone
        #[arg(
            long,
            value_delimiter = ',',
            allow_hyphen_values = true,
            required = true
        )]
        values: Vec<f64>,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        regimes: RegimeArgs,
        #[arg(long)]
        c1_constant: Option<f64>,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        tilt: TiltArgs,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance checks.
    Verify {
        /// quick: formula checks in seconds; full: all criteria, minutes
        #[arg(long, value_enum, default_value_t = Level::Quick)]
        level: Level,
        /// Seed of the random streams
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Multiplier on every simulation sample size
        #[arg(long, default_value_t = 1.0)]
        budget: f64,
        #[arg(long)]
        threads: Option<usize>,
        /// Record format [default: plain text report]
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Correlation of the two Brownian motions
    #[arg(long, allow_hyphen_values = true)]
    rho: Option<f64>,
    /// Premium rate of the first portfolio
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c1: f64,
    /// Premium rate of the second portfolio
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c2: f64,
    /// Initial capital of the first portfolio
    #[arg(long)]
    u: Option<f64>,
    /// Initial capital of the second portfolio
    #[arg(long, allow_hyphen_values = true)]
    v: Option<f64>,
    /// Capital ratio, v = a u
    #[arg(long)]
    a: Option<f64>,
    /// Time horizon T
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
}

#[derive(Args, Debug, Clone, Copy)]
struct RegimeArgs {
    /// Equality tolerance on regime boundaries
    #[arg(long, default_value_t = ruin_core::asymptotics::DEFAULT_TOL)]
    tol: f64,
    /// Use the printed critical correlation (1 - sqrt(a^2 + 8)) / (4a)
    #[arg(long)]
    paper_aa: bool,
    /// Use the printed regime IV/V constants instead of the corrected ones
    #[arg(long)]
    printed_constants: bool,
}

#[derive(Args, Debug, Clone, Copy)]
struct SamplingArgs {
    /// Sample paths [default: 100000]
    #[arg(long)]
    n: Option<u64>,
    /// Time steps on the horizon [default: 16384, 4096 for pickands]
    #[arg(long)]
    grid: Option<usize>,
    /// Seed of the random streams
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads [default: RUIN_THREADS or all cores]
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args, Debug, Clone, Copy)]
struct TiltArgs {
    /// Estimator [default: importance when a tilt is given or in sweeps of
    /// full-dimensional regimes, crude otherwise]
    #[arg(long, value_enum)]
    estimator: Option<Estimator>,
    /// Constant drift added to W1 under the sampling measure
    #[arg(long, allow_hyphen_values = true, requires = "tilt_mu2")]
    tilt_mu1: Option<f64>,
    /// Constant drift added to W2 under the sampling measure
    #[arg(long, allow_hyphen_values = true, requires = "tilt_mu1")]
    tilt_mu2: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Add wall_time_ms to every record (breaks byte-identical reruns)
    #[arg(long)]
    timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Estimator {
    Crude,
    Importance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    U,
    Rho,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Quick,
    Full,
}

#[derive(Debug)]
enum Failure {
    Invalid(String),
    Numeric(String),
    Io(std::io::Error),
    Verify,
}

impl From<RuinError> for Failure {
    fn from(e: RuinError) -> Self {
        match e {
            RuinError::InvalidParameter {
                name,
                value,
                reason,
            } => Failure::Invalid(format!("invalid {} = {value}: {reason}", flag(name))),
            RuinError::Numeric { .. } | RuinError::NotPositiveDefinite { .. } => {
                Failure::Numeric(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Command-line flag behind a library parameter name.
fn flag(name: &str) -> String {
    let f = match name {
        "n_samples" => "n",
        "grid_points" => "grid",
        "lambda1" | "lambda2" => "a",
        "C1" => "c1-constant",
        other => other,
    };
    format!("--{}", f.replace('_', "-"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => ExitCode::from(4),
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
