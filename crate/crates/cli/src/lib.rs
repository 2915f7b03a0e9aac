//! Command-line front end for the `errdist` library.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use errdist::{ErrorModel, Kernel};

pub use error::{CliError, CliResult};

/// Error-distribution estimation in nonparametric regression.
#[derive(Debug, Parser)]
#[command(name = "errdist", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a dataset and write residuals and the smoothed error distribution.
    Estimate(EstimateArgs),
    /// Tabulate the asymptotic variances of an error model over a t grid.
    VarianceTable(VarianceTableArgs),
    /// Run a Monte Carlo study from a config file.
    Simulate(SimulateArgs),
    /// Track the expansion remainder across sample sizes.
    Convergence(ConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// CSV file with header `z,y`.
    pub input: Option<PathBuf>,
    /// Config (or a previous manifest) with an `[estimate]` section. Flags
    /// given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// Local polynomial order [default: 2].
    #[arg(long)]
    pub order: Option<usize>,
    /// Constant in a_n = a·n^(-1/4)/ln n [default: 1].
    #[arg(long)]
    pub a_const: Option<f64>,
    /// Constant in c_n = c·n^(-1/4) [default: 1].
    #[arg(long)]
    pub c_const: Option<f64>,
    /// Points of the output curve, spanning the residual range ± a_n [default: 512].
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Kernel of the smoothed distribution function [default: triweight].
    #[arg(long)]
    pub smoothing_kernel: Option<Kernel>,
    /// Kernel of the regression smoother [default: epanechnikov].
    #[arg(long)]
    pub regression_kernel: Option<Kernel>,
}

#[derive(Debug, Args)]
pub struct VarianceTableArgs {
    /// `normal:σ`, `student_t:ν[,scale]` or `uniform:b`.
    #[arg(long, default_value = "normal:1")]
    pub error: ErrorModel,
    /// Comma-separated values or `linspace:start,stop,count`.
    #[arg(long, default_value = "linspace:-3,3,61", allow_hyphen_values = true)]
    pub t_grid: String,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    /// Worker threads for the replications [default: machine parallelism].
    #[arg(long, env = "ERRDIST_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

#[derive(Debug, Args)]
pub struct ConvergenceArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated sample sizes; overrides `sizes` in `[grids]`.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Estimate(a) => commands::estimate(&a),
        Command::VarianceTable(a) => commands::variance_table(&a),
        Command::Simulate(a) => commands::simulate(&a),
        Command::Convergence(a) => commands::convergence(&a),
    }
}
