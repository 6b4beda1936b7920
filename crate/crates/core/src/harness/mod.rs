//! Config-driven experiments: JSON in, CSV and a run manifest out.

mod config;
mod output;
mod reproduce;
mod run;

use std::path::PathBuf;

pub use config::{
    load_config, parse_config, AnalyticQuery, BoundsTarget, BudgetConfig, Experiment, ExperimentConfig, Figure,
    OffsetConfig, PlanConfig, TwiConfig, DEFAULT_TRIALS, SCHEMA_VERSION,
};
pub use output::{Cell, ColumnLabels, Manifest, ResultRow, ResultTable};
pub use reproduce::{figure7_table, figure8_table, FIG8_W_OVER_TAU};
pub use run::{compute_table, run_experiment, RunOptions, RunReport};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{origin}:{line}:{column}: invalid config at `{field}`: {message}")]
    Parse {
        origin: String,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid config: `{field}`: {reason}")]
    Semantic { field: String, reason: String },
    #[error("run failed: {0}")]
    Runtime(#[from] crate::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Parse { .. } | HarnessError::Semantic { .. } => EXIT_CONFIG,
            HarnessError::Runtime(_) => EXIT_RUNTIME,
            HarnessError::Io { .. } => EXIT_IO,
        }
    }
}
