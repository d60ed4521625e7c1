//! Parallel execution of every (cell, trial) pair.

use flock_core::NeighborMode;
use rayon::prelude::*;

use crate::config::{Cell, ExperimentConfig};
use crate::summary::{summarize, SweepSummary};
use crate::trial::{run_trial_with, TrialResult};
use crate::HarnessError;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<Cell>,
    /// Ordered by (cell, trial).
    pub trials: Vec<TrialResult>,
    pub summary: SweepSummary,
}

/// Runs the trials of `cells` on up to `threads` workers (0 = all cores).
/// Each trial owns its simulation and results are collected in (cell,
/// trial) order, so the output does not depend on scheduling.
pub fn run_cells(cells: &[Cell], threads: usize, mode: NeighborMode) -> Result<Vec<TrialResult>, HarnessError> {
    let jobs: Vec<(&Cell, usize)> = cells.iter().flat_map(|c| (0..c.trials).map(move |t| (c, t))).collect();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build()?;
    Ok(pool.install(|| jobs.par_iter().map(|&(c, t)| run_trial_with(c, t, mode)).collect()))
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult, HarnessError> {
    let cells = cfg.cells()?;
    let trials = run_cells(&cells, cfg.threads, NeighborMode::Indexed)?;
    let summary = summarize(&trials);
    Ok(SweepResult { cells, trials, summary })
}
