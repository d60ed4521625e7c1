//! Per-cell aggregation over trials.

use std::collections::BTreeMap;

use flock_core::metrics::Convergence;
use flock_core::MetricSample;

use crate::trial::TrialResult;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    FlockCount,
    LoneCount,
    LoneFraction,
    MaxAlignedCount,
    ControlledCount,
    OffworldCount,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::FlockCount,
        Metric::LoneCount,
        Metric::LoneFraction,
        Metric::MaxAlignedCount,
        Metric::ControlledCount,
        Metric::OffworldCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::FlockCount => "flock_count",
            Metric::LoneCount => "lone_count",
            Metric::LoneFraction => "lone_fraction",
            Metric::MaxAlignedCount => "max_aligned_count",
            Metric::ControlledCount => "controlled_count",
            Metric::OffworldCount => "offworld_count",
        }
    }

    pub fn value(self, s: &MetricSample) -> f64 {
        match self {
            Metric::FlockCount => s.flock_count as f64,
            Metric::LoneCount => s.lone_count as f64,
            Metric::LoneFraction => s.lone_fraction,
            Metric::MaxAlignedCount => s.max_aligned_count as f64,
            Metric::ControlledCount => s.controlled_count as f64,
            Metric::OffworldCount => s.offworld_count as f64,
        }
    }
}

/// Mean and standard error of the mean (sample standard deviation over √n).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sem: f64,
    pub n: usize,
}

impl Stat {
    pub fn of(values: &[f64]) -> Option<Stat> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let sem = if n == 1 {
            0.0
        } else {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        };
        Some(Stat { mean, sem, n })
    }

    /// SEM is reported as 0 but carries no information.
    pub fn single_trial(&self) -> bool {
        self.n == 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceSummary {
    /// Over converged trials only; `None` when every trial was censored.
    pub converged: Option<Stat>,
    pub censored: usize,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellSummary {
    pub cell: usize,
    /// Keyed by (metric, step). Early-exited trials simply stop
    /// contributing, so `n` can shrink at later steps.
    pub series: BTreeMap<(Metric, u64), Stat>,
    pub convergence: ConvergenceSummary,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepSummary {
    pub cells: Vec<CellSummary>,
}

impl SweepSummary {
    pub fn cell(&self, cell: usize) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.cell == cell)
    }
}

impl CellSummary {
    pub fn mean(&self, metric: Metric, step: u64) -> Option<f64> {
        self.series.get(&(metric, step)).map(|s| s.mean)
    }
}

/// Aggregates trials per cell, in (cell, trial) order so results do not
/// depend on the order of `results`.
pub fn summarize(results: &[TrialResult]) -> SweepSummary {
    let mut by_cell: BTreeMap<usize, Vec<&TrialResult>> = BTreeMap::new();
    for r in results {
        by_cell.entry(r.cell).or_default().push(r);
    }
    let cells = by_cell
        .into_iter()
        .map(|(cell, mut trials)| {
            trials.sort_by_key(|t| t.trial);
            let mut values: BTreeMap<(Metric, u64), Vec<f64>> = BTreeMap::new();
            for t in &trials {
                for s in &t.samples {
                    for m in Metric::ALL {
                        values.entry((m, s.step)).or_default().push(m.value(s));
                    }
                }
            }
            let series = values.into_iter().map(|(k, v)| (k, Stat::of(&v).expect("non-empty"))).collect();
            let steps: Vec<f64> = trials
                .iter()
                .filter_map(|t| match t.convergence {
                    Convergence::At(s) => Some(s as f64),
                    Convergence::Censored(_) => None,
                })
                .collect();
            let convergence = ConvergenceSummary {
                converged: Stat::of(&steps),
                censored: trials.len() - steps.len(),
                trials: trials.len(),
            };
            CellSummary { cell, series, convergence }
        })
        .collect();
    SweepSummary { cells }
}
