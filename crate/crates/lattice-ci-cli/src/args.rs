//! Command-line interface definition.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_ci::Method;

#[derive(Debug, Parser)]
#[command(
    name = "lattice-ci",
    version,
    about = "Confidence intervals for a binomial proportion and their exact evaluation",
    long_about = "Computes non-randomized, externally randomized and data-randomized \
                  confidence intervals for a binomial proportion, and evaluates their \
                  exact coverage, expected length and randomization ranges. Output is \
                  CSV with a header row; identical flags and seed give byte-identical \
                  output. Sweeps run on a worker pool; set LATTICE_CI_THREADS to \
                  override the worker count."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute one confidence interval
    Interval(IntervalArgs),
    /// Exact coverage across a grid of true proportions
    Coverage(SweepArgs),
    /// Exact expected length across a grid of true proportions
    Length(SweepArgs),
    /// Extremes of the upper bound over the randomization, for every x
    Range(RangeArgs),
    /// Distinct randomization values at a given n
    Distinct(DistinctArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Wilson,
    ClopperPearson,
    MidP,
    SplitWilson,
    UNoiseWilson,
    Stevens,
    Korn,
    DataRandUWilson,
}

impl MethodArg {
    pub fn method(self) -> Method {
        match self {
            MethodArg::Wilson => Method::Wilson,
            MethodArg::ClopperPearson => Method::ClopperPearson,
            MethodArg::MidP => Method::MidP,
            MethodArg::SplitWilson => Method::SplitWilson,
            MethodArg::UNoiseWilson => Method::UNoiseWilson,
            MethodArg::Stevens => Method::Stevens,
            MethodArg::Korn => Method::Korn,
            MethodArg::DataRandUWilson => Method::DataRandUWilson,
        }
    }
}

#[derive(Debug, Args)]
pub struct IntervalArgs {
    /// Interval construction method
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Number of trials (derived from --sequence when that is given)
    #[arg(long)]
    pub n: Option<u64>,

    /// Number of successes (aggregate-data methods)
    #[arg(long)]
    pub x: Option<u64>,

    /// Recorded trial outcomes, e.g. "0010110" (data-randomized methods)
    #[arg(long)]
    pub sequence: Option<String>,

    /// Nominal level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// PRNG seed; required for externally randomized methods, forbidden
    /// otherwise
    #[arg(long)]
    pub seed: Option<u64>,

    /// Output file (defaults to standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Interval construction method
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Number of trials
    #[arg(long)]
    pub n: u64,

    /// Nominal level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// First grid point
    #[arg(long, default_value_t = 0.001)]
    pub grid_start: f64,

    /// Last grid point
    #[arg(long, default_value_t = 0.999)]
    pub grid_stop: f64,

    /// Number of evenly spaced grid points
    #[arg(long, default_value_t = 999)]
    pub grid_points: usize,

    /// Output file (defaults to standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Interval construction method (must be randomized)
    #[arg(long, value_enum)]
    pub method: MethodArg,

    /// Number of trials
    #[arg(long)]
    pub n: u64,

    /// Nominal level
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,

    /// Output file (defaults to standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistinctArgs {
    /// Number of trials
    #[arg(long)]
    pub n: u64,

    /// Output file (defaults to standard output)
    #[arg(long)]
    pub output: Option<PathBuf>,
}
