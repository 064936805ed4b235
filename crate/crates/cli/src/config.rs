use clap::ValueEnum;
use maxcont_core::{AnalysisConfig, Tolerances};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::RunArgs;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a run depends on besides its inputs; echoed into every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n_grid: usize,
    pub tolerances: Tolerances,
    pub radii: Vec<f64>,
    pub n_directions: usize,
    pub seed: u64,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        let cfg = Self {
            n_grid: args.grid,
            tolerances: Tolerances::default(),
            radii: args.radii.clone(),
            n_directions: args.directions,
            seed: args.seed,
            format: args.format,
        };
        cfg.analysis(true)
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }

    pub fn analysis(&self, run_oracle: bool) -> AnalysisConfig {
        AnalysisConfig {
            n_grid: self.n_grid,
            tolerances: self.tolerances,
            radii: self.radii.clone(),
            n_directions: self.n_directions,
            run_oracle,
        }
    }
}
