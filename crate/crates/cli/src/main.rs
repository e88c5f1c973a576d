//! `softpack` command-line front end.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use softpack::Error;

#[derive(Debug, Parser)]
#[command(name = "softpack", version, about = "Soft-ball packing bounds, densities and extremal configurations")]
struct Cli {
    /// Seed for every Monte Carlo estimate and optimizer run.
    #[arg(long, global = true, env = "SOFTPACK_SEED", default_value_t = 1)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Table of density bounds over a λ range.
    Bounds(BoundsArgs),
    /// Union measure and density of a packing file.
    Density(DensityArgs),
    /// Run one of the verification suites.
    Verify(VerifyArgs),
    /// Search for a packing of least inflated union.
    Optimize(OptimizeArgs),
    /// Lattice density and covering checks.
    Lattice(LatticeArgs),
    /// Print the named constants.
    Constants,
}

#[derive(Debug, Args)]
struct BoundsArgs {
    #[arg(long)]
    dim: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    lambda_min: f64,
    #[arg(long, allow_negative_numbers = true)]
    lambda_max: f64,
    #[arg(long, default_value_t = 16)]
    steps: usize,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One row per (λ, bound) instead of one row per λ.
    #[arg(long, conflicts_with = "json")]
    long: bool,
    #[arg(long)]
    json: bool,
    /// Monte Carlo samples for dimensions 4 and up.
    #[arg(long, default_value_t = 200_000)]
    samples: u64,
}

#[derive(Debug, Args)]
struct DensityArgs {
    /// Packing file, JSON or `.csv`.
    #[arg(long)]
    packing: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    /// Also estimate by Monte Carlo: SAMPLES SEED.
    #[arg(long, num_args = 2, value_names = ["SAMPLES", "SEED"])]
    mc: Option<Vec<u64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Groemer,
    #[value(name = "rogersF", alias = "rogersf")]
    RogersF,
    SigmaConsistency,
    Gram,
    Constants,
    Covering,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Grid size of the suite (λ points or scan resolution).
    #[arg(long, default_value_t = 100)]
    grid: usize,
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

#[derive(Debug, Args)]
struct OptimizeArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    lambda: f64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[arg(long, default_value_t = 1500)]
    iters: usize,
    /// JSON dump of the best packing; the history goes next to it as
    /// `<stem>.history.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LatticeCheck {
    Density,
    Covering,
}

#[derive(Debug, Args)]
struct LatticeArgs {
    #[arg(long)]
    kind: String,
    #[arg(long, value_enum, default_value_t = LatticeCheck::Density)]
    check: LatticeCheck,
    /// Monte Carlo samples for the covering check.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
}

/// Failure of a command, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
    Verification(usize),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Verification(_) => 4,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDimension(_)
            | Error::NegativeInput { .. }
            | Error::Domain { .. }
            | Error::NotPairwise { .. }
            | Error::WrongDimension { .. }
            | Error::NoSamples
            | Error::Unknown { .. } => Failure::Usage(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Metadata written at the top of every CSV output.
pub struct RunInfo {
    pub seed: u64,
    pub flags: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let info = RunInfo { seed: cli.seed, flags: std::env::args().skip(1).collect::<Vec<_>>().join(" ") };
    let result = match cli.command {
        Command::Bounds(a) => commands::bounds(
            &info,
            a.dim,
            (a.lambda_min, a.lambda_max, a.steps),
            a.samples,
            a.long,
            a.json,
            a.out.as_deref(),
        ),
        Command::Density(a) => commands::density(&info, &a.packing, a.lambda, a.mc.map(|v| (v[0], v[1]))),
        Command::Verify(a) => verify::run(a.suite, a.grid, a.samples, cli.seed),
        Command::Optimize(a) => commands::optimize(&info, a.n, a.dim, a.lambda, a.restarts, a.iters, a.out.as_deref()),
        Command::Lattice(a) => commands::lattice(&a.kind, a.check, a.samples, cli.seed),
        Command::Constants => commands::constants(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) | Failure::Input(m) => eprintln!("error: {m}"),
                Failure::Verification(n) => eprintln!("{n} check(s) failed"),
            }
            ExitCode::from(f.code())
        }
    }
}
