//! Command-line front end: matrix ingestion, the five subcommands and their
//! JSON/CSV reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod input;
pub mod output;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use maxcont_core::ExpectedValue;

pub use commands::{run, Outcome};
pub use config::{Format, RunConfig};
pub use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "maxcont", version)]
#[command(about = "Numerical range, maximum-entropy inference and its discontinuities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Support function h(θ) and boundary points of W(A)
    Boundary(RunArgs),
    /// Eigenvalue branches and Kippenhahn curve points
    Curves(RunArgs),
    /// Maximum-entropy state for a given expected value
    Infer(PointArgs),
    /// Full discontinuity analysis with oracle cross-checks
    Analyze(AnalyzeArgs),
    /// Sequential-continuity oracle at one point
    Oracle(PointArgs),
}

/// A point `RE,IM` of the plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point(pub ExpectedValue);

impl FromStr for Point {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let [re, im] = parts.as_slice() else {
            return Err(format!("expected RE,IM but got `{s}`"));
        };
        let parse = |x: &str| x.parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
        let p = ExpectedValue::new(parse(re)?, parse(im)?);
        if !p.is_finite() {
            return Err(format!("`{s}` is not finite"));
        }
        Ok(Point(p))
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Matrix file: {"d": n, "re": [[..]], "im": [[..]]}
    #[arg(long)]
    pub input: PathBuf,

    /// Number of angles sampled over [0, 2π)
    #[arg(long, default_value_t = 4096)]
    pub grid: usize,

    /// Oracle radii, strictly decreasing
    #[arg(long, value_delimiter = ',', default_values_t = vec![1e-2, 1e-3, 1e-4])]
    pub radii: Vec<f64>,

    /// Oracle approach directions per radius
    #[arg(long, default_value_t = 16)]
    pub directions: usize,

    /// Seed for randomized procedures
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Output file, written atomically; stdout if omitted
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Expected value as RE,IM
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Point,

    /// Prior state file (same schema as the matrix file)
    #[arg(long)]
    pub prior: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Prior state file to include in the prior-invariance check
    #[arg(long)]
    pub prior: Option<PathBuf>,

    /// Number of seeded random priors for the prior-invariance check
    #[arg(long, default_value_t = 0)]
    pub random_priors: usize,
}
