//! Command-line front end for `mifde-core`.
//!
//! `mifde mlf` evaluates Mittag-Leffler functions, `mifde solve` integrates a
//! system file with one of the three solvers, `mifde stability` classifies a
//! system or samples a stability boundary, and `mifde figure` writes the
//! datasets of the reference figures.

pub mod commands;
pub mod error;
pub mod system;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult, EXIT_INPUT, EXIT_NUMERICAL, EXIT_OK};
pub use system::{ParsedSystem, SystemFile};

#[derive(Debug, Parser)]
#[command(name = "mifde", version, about = "Linear fractional differential systems with mixed Caputo orders")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by the subcommands. Values given here override the system file.
#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// Series truncation tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Maximum series depth (levels or terms).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Time step of the output grid and of the L1 stepper.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate E^γ_{α,β}(z).
    #[command(allow_negative_numbers = true)]
    Mlf {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, default_value_t = 1)]
        gamma: u32,
        /// Real part of the argument.
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        /// Imaginary part of the argument.
        #[arg(long, default_value_t = 0.0)]
        z_im: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Solve a system file and write the trajectory as CSV.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Series)]
        method: Method,
        /// Richardson-extrapolate the L1 solution.
        #[arg(long)]
        richardson: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Stability verdicts and boundary curves.
    Stability {
        #[command(subcommand)]
        mode: StabilityMode,
    },
    /// Write the CSV datasets of a figure into a directory.
    Figure {
        #[arg(value_enum)]
        id: FigureId,
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Series,
    L1,
    Spectral,
}

#[derive(Debug, Subcommand)]
pub enum StabilityMode {
    /// Classify the system in a file as stable, marginal or unstable.
    Check {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Sample the boundary of `A = [[d, −θ], [θ, d]]` for two orders.
    #[command(allow_negative_numbers = true)]
    Boundary {
        /// Takes the two orders from this file unless given as flags.
        file: Option<PathBuf>,
        #[arg(long)]
        alpha: Option<String>,
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 1e-3)]
        x_min: f64,
        #[arg(long, default_value_t = 1e3)]
        x_max: f64,
        #[arg(long, default_value_t = 601)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl FigureId {
    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
        }
    }
}

/// Runs a parsed command line. Results go to `out`, warnings to `err`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        Command::Mlf { alpha, beta, gamma, z, z_im, common } => commands::mlf(alpha, beta, gamma, z, z_im, &common, out, err),
        Command::Solve { file, method, richardson, common } => commands::solve(&file, method, richardson, &common, out, err),
        Command::Stability { mode: StabilityMode::Check { file, common } } => commands::check(&file, &common, out, err),
        Command::Stability { mode: StabilityMode::Boundary { file, alpha, beta, x_min, x_max, samples, common } } => {
            let spec = commands::BoundarySpec { file, alpha, beta, x_min, x_max, samples };
            commands::boundary(&spec, &common, out, err)
        }
        Command::Figure { id, out_dir, common } => commands::figure(id, out_dir, &common, out, err),
    }
}
