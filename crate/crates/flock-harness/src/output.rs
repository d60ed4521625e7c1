//! CSV files.
//!
//! * `timeseries.csv`: `cell,trial,seed,step,` then the metric columns.
//! * `convergence.csv`: `cell,trial,step,censored`.
//! * `summary.csv`: long form `cell,metric,step,mean,sem`. Besides one row
//!   per metric and sampled step, each cell gets a `convergence_step` row
//!   (mean over converged trials, or `censored` if none converged) and a
//!   `censored_trials` row with the count; their `step` is empty.
//! * `cells.csv`: the parameters of every cell index.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use flock_core::metrics::Convergence;
use flock_core::MetricSample;
use serde::{Deserialize, Serialize};

use crate::config::Cell;
use crate::summary::SweepSummary;
use crate::sweep::SweepResult;
use crate::trial::TrialResult;
use crate::HarnessError;

pub const TIMESERIES: &str = "timeseries.csv";
pub const CONVERGENCE: &str = "convergence.csv";
pub const SUMMARY: &str = "summary.csv";
pub const CELLS: &str = "cells.csv";

#[derive(Debug, Serialize, Deserialize)]
struct TimeseriesRow {
    cell: usize,
    trial: usize,
    seed: u64,
    step: u64,
    flock_count: usize,
    lone_count: usize,
    lone_fraction: f64,
    max_aligned_count: usize,
    controlled_count: usize,
    offworld_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ConvergenceRow {
    cell: usize,
    trial: usize,
    step: u64,
    censored: bool,
}

#[derive(Debug, Serialize)]
struct SummaryRow<'a> {
    cell: usize,
    metric: &'a str,
    step: Option<u64>,
    mean: String,
    sem: String,
}

#[derive(Debug, Serialize)]
struct CellRow {
    cell: usize,
    setting: String,
    rv_count: usize,
    inf_count: usize,
    placement: String,
    placement_radius: f64,
    behavior: String,
    goal_theta: f64,
    threshold: usize,
    max_steps: u64,
    sample_interval: u64,
    trials: usize,
    base_seed: u64,
}

fn to_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
}

pub fn timeseries_csv(trials: &[TrialResult]) -> Result<Vec<u8>, HarnessError> {
    to_bytes(trials.iter().flat_map(|t| {
        t.samples.iter().map(move |s| TimeseriesRow {
            cell: t.cell,
            trial: t.trial,
            seed: t.seed,
            step: s.step,
            flock_count: s.flock_count,
            lone_count: s.lone_count,
            lone_fraction: s.lone_fraction,
            max_aligned_count: s.max_aligned_count,
            controlled_count: s.controlled_count,
            offworld_count: s.offworld_count,
        })
    }))
}

pub fn convergence_csv(trials: &[TrialResult]) -> Result<Vec<u8>, HarnessError> {
    to_bytes(trials.iter().map(|t| ConvergenceRow {
        cell: t.cell,
        trial: t.trial,
        step: t.convergence.step(),
        censored: t.convergence.is_censored(),
    }))
}

pub fn summary_csv(summary: &SweepSummary) -> Result<Vec<u8>, HarnessError> {
    let mut rows = Vec::new();
    for c in &summary.cells {
        for (&(metric, step), stat) in &c.series {
            rows.push(SummaryRow {
                cell: c.cell,
                metric: metric.name(),
                step: Some(step),
                mean: stat.mean.to_string(),
                sem: stat.sem.to_string(),
            });
        }
        let (mean, sem) = match c.convergence.converged {
            Some(s) => (s.mean.to_string(), s.sem.to_string()),
            None => ("censored".to_string(), String::new()),
        };
        rows.push(SummaryRow { cell: c.cell, metric: "convergence_step", step: None, mean, sem });
        rows.push(SummaryRow {
            cell: c.cell,
            metric: "censored_trials",
            step: None,
            mean: c.convergence.censored.to_string(),
            sem: "0".to_string(),
        });
    }
    to_bytes(rows)
}

pub fn cells_csv(cells: &[Cell]) -> Result<Vec<u8>, HarnessError> {
    to_bytes(cells.iter().map(|c| CellRow {
        cell: c.index,
        setting: c.setting.to_string(),
        rv_count: c.rv_count,
        inf_count: c.inf_count(),
        placement: c.placement.strategy.to_string(),
        placement_radius: c.placement.radius,
        behavior: c.behavior.kind.to_string(),
        goal_theta: c.behavior.goal,
        threshold: c.behavior.threshold,
        max_steps: c.max_steps,
        sample_interval: c.sample_interval,
        trials: c.trials,
        base_seed: c.base_seed,
    }))
}

/// Writes all four files into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, result: &SweepResult) -> Result<(), HarnessError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(TIMESERIES), timeseries_csv(&result.trials)?)?;
    fs::write(dir.join(CONVERGENCE), convergence_csv(&result.trials)?)?;
    fs::write(dir.join(SUMMARY), summary_csv(&result.summary)?)?;
    fs::write(dir.join(CELLS), cells_csv(&result.cells)?)?;
    Ok(())
}

/// Rebuilds trial results from `timeseries.csv` and `convergence.csv` in
/// `dir`.
pub fn read_results(dir: &Path) -> Result<Vec<TrialResult>, HarnessError> {
    let mut trials: BTreeMap<(usize, usize), TrialResult> = BTreeMap::new();
    for row in csv::Reader::from_path(dir.join(TIMESERIES))?.deserialize() {
        let r: TimeseriesRow = row?;
        let t = trials.entry((r.cell, r.trial)).or_insert_with(|| TrialResult {
            cell: r.cell,
            trial: r.trial,
            seed: r.seed,
            samples: Vec::new(),
            convergence: Convergence::Censored(0),
        });
        t.samples.push(MetricSample {
            step: r.step,
            flock_count: r.flock_count,
            lone_count: r.lone_count,
            lone_fraction: r.lone_fraction,
            max_aligned_count: r.max_aligned_count,
            controlled_count: r.controlled_count,
            offworld_count: r.offworld_count,
        });
    }
    for row in csv::Reader::from_path(dir.join(CONVERGENCE))?.deserialize() {
        let r: ConvergenceRow = row?;
        let t = trials
            .get_mut(&(r.cell, r.trial))
            .ok_or(HarnessError::Inconsistent { cell: r.cell, trial: r.trial })?;
        t.convergence = if r.censored { Convergence::Censored(r.step) } else { Convergence::At(r.step) };
    }
    Ok(trials.into_values().collect())
}
