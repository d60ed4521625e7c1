//! Single seeded trials.

use flock_core::metrics::{convergence_step, convergence_threshold, sample, Convergence};
use flock_core::seed::mix_seed;
use flock_core::{MetricSample, NeighborMode, SimState};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Cell;

#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    /// Samples at steps `0, interval, 2·interval, …`.
    pub samples: Vec<MetricSample>,
    pub convergence: Convergence,
}

pub fn trial_seed(cell: &Cell, trial: usize) -> u64 {
    mix_seed(cell.base_seed, cell.index as u64, trial as u64)
}

/// Initial state of a trial, before any step.
pub fn initial_state(cell: &Cell, trial: usize) -> SimState {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cell, trial));
    let placement = (cell.inf_count() > 0).then_some(&cell.placement);
    SimState::seeded(cell.setting, cell.rv_count, placement, &cell.behavior, &mut rng)
        .expect("cell was validated")
}

pub fn run_trial(cell: &Cell, trial: usize) -> TrialResult {
    run_trial_with(cell, trial, NeighborMode::Indexed)
}

pub fn run_trial_with(cell: &Cell, trial: usize, mode: NeighborMode) -> TrialResult {
    let mut sim = initial_state(cell, trial).with_neighbor_mode(mode);
    let need = convergence_threshold(cell.rv_count);
    let mut samples = Vec::with_capacity(cell.samples_per_trial() as usize);
    loop {
        let s = sample(&sim, &cell.metrics);
        samples.push(s);
        if sim.step >= cell.max_steps || (cell.early_exit && s.max_aligned_count >= need) {
            break;
        }
        sim.run(&cell.behavior, cell.sample_interval);
    }
    TrialResult {
        cell: cell.index,
        trial,
        seed: trial_seed(cell, trial),
        convergence: convergence_step(&samples, cell.rv_count),
        samples,
    }
}
