//! Experiment harness for `flock-core`: configuration files, seeded trials,
//! parallel parameter sweeps, summaries and CSV output.

pub mod config;
pub mod output;
pub mod summary;
pub mod sweep;
pub mod trial;

pub use config::{parse_config, Axes, Cell, ConfigError, ConfigFile, ExperimentConfig};
pub use summary::{summarize, Metric, Stat, SweepSummary};
pub use sweep::{run_cells, run_sweep, SweepResult};
pub use trial::{run_trial, TrialResult};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("could not start worker threads: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("convergence row for cell {cell}, trial {trial} has no time series")]
    Inconsistent { cell: usize, trial: usize },
}
