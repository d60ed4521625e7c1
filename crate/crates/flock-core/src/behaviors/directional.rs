//! Goal-direction controllers: face, offset momentum, one-step lookahead and
//! the paired (coordinated) lookahead.

use alloc::vec::Vec;

use crate::agent::AgentState;
use crate::geom::{angle_diff, distance_sq, Vec2};
use crate::math::{self, TAU};
use crate::rules::rv_next_heading;
use crate::spatial::{within, SpatialIndex};
use crate::world::WorldSpec;

#[inline]
pub fn act_face(goal: f64) -> f64 {
    goal
}

/// Heading of `goal_velocity − mean(neighbor velocities)`, where every
/// velocity has norm `speed`. Falls back to `goal` with no neighbors or a
/// vanishing offset.
pub fn act_offset_momentum<I>(neighbor_headings: I, goal: f64, speed: f64) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = Vec2::ZERO;
    let mut n = 0usize;
    for h in neighbor_headings {
        sum += Vec2::from_polar(speed, h);
        n += 1;
    }
    if n == 0 {
        return goal;
    }
    let offset = Vec2::from_polar(speed, goal) - sum / n as f64;
    if offset.norm() <= 1e-12 * speed {
        return goal;
    }
    offset.angle()
}

/// `count` headings evenly spaced around the circle starting at `goal`.
pub fn candidate_headings(goal: f64, count: usize) -> impl Iterator<Item = f64> + Clone {
    (0..count).map(move |k| math::normalize_angle(goal + TAU * k as f64 / count as f64))
}

/// One input to a simulated neighbor update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProbeInput {
    /// Heading of an agent the controller does not steer.
    Fixed(f64),
    /// Heading chosen by controlled influencer number `n`.
    Slot(usize),
}

/// A Reynolds-Vicsek agent next to a controlled influencer, with everything
/// needed to replay its next alignment step.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub heading: f64,
    /// Its neighbors in ascending id order.
    pub inputs: Vec<ProbeInput>,
}

impl Probe {
    #[inline]
    pub fn next_heading(&self, slots: &[f64]) -> f64 {
        rv_next_heading(
            self.heading,
            self.inputs.iter().map(|i| match *i {
                ProbeInput::Fixed(h) => h,
                ProbeInput::Slot(s) => slots[s],
            }),
        )
    }
}

/// Collects probes for the influencers at `controlled` (agent indices).
///
/// Only agents inside one of the influencers' sensing balls (radius 2r) are
/// visible; a probe is a visible Reynolds-Vicsek agent within r of some
/// controlled influencer. Probes come back in ascending id order.
pub fn build_probes(
    agents: &[AgentState],
    positions: &[Vec2],
    world: &WorldSpec,
    index: &SpatialIndex,
    controlled: &[usize],
) -> Vec<Probe> {
    let r = world.neighborhood_radius;
    let mut visible = Vec::new();
    for &c in controlled {
        index.query_into(positions, world, positions[c], world.sensing_radius(), None, &mut visible);
    }
    visible.sort_unstable_by_key(|&k| agents[k].id);
    visible.dedup();

    visible
        .iter()
        .filter(|&&j| {
            !agents[j].is_influencer() && controlled.iter().any(|&c| within(positions[j], positions[c], world, r))
        })
        .map(|&j| Probe {
            heading: agents[j].heading,
            inputs: visible
                .iter()
                .filter(|&&k| k != j && within(positions[j], positions[k], world, r))
                .map(|&k| match controlled.iter().position(|&c| c == k) {
                    Some(slot) => ProbeInput::Slot(slot),
                    None => ProbeInput::Fixed(agents[k].heading),
                })
                .collect(),
        })
        .collect()
}

/// Mean `|angle_diff(next heading, goal)|` over `probes` with the controlled
/// headings set to `slots`.
pub fn probe_objective(probes: &[Probe], goal: f64, slots: &[f64]) -> f64 {
    let total: f64 = probes.iter().map(|p| angle_diff(p.next_heading(slots), goal).abs()).sum();
    total / probes.len() as f64
}

/// One-step lookahead: the candidate heading that minimizes the probes' mean
/// angular error to `goal` after one simulated step. Lowest candidate index
/// wins ties; no probes means face the goal.
pub fn act_lookahead(probes: &[Probe], goal: f64, candidates: usize) -> f64 {
    if probes.is_empty() {
        return goal;
    }
    let mut best = (goal, f64::INFINITY);
    for c in candidate_headings(goal, candidates) {
        let obj = probe_objective(probes, goal, &[c]);
        if obj < best.1 {
            best = (c, obj);
        }
    }
    best.0
}

/// Joint lookahead for a pair over the full `candidates × candidates` grid,
/// scoring the union of both neighborhoods. Ties go to the lexicographically
/// smallest index pair.
pub fn act_coordinated(probes: &[Probe], goal: f64, candidates: usize) -> (f64, f64) {
    if probes.is_empty() {
        return (goal, goal);
    }
    let mut best = ((goal, goal), f64::INFINITY);
    for a in candidate_headings(goal, candidates) {
        for b in candidate_headings(goal, candidates) {
            let obj = probe_objective(probes, goal, &[a, b]);
            if obj < best.1 {
                best = ((a, b), obj);
            }
        }
    }
    best.0
}

/// Fixed partner assignment for the coordinated behavior.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    /// Index pairs into the input slice, lower index first.
    pub pairs: Vec<(usize, usize)>,
    /// Agents left without a partner (at most one).
    pub solo: Vec<usize>,
}

/// Greedy closest-first matching: repeatedly pairs the two closest unpaired
/// points. Distance ties go to the lower index pair.
pub fn pair_influencers(points: &[Vec2], world: &WorldSpec) -> Pairing {
    let n = points.len();
    let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            edges.push((distance_sq(points[i], points[j], world), i, j));
        }
    }
    edges.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut taken = alloc::vec![false; n];
    let mut pairs = Vec::with_capacity(n / 2);
    for (_, i, j) in edges {
        if !taken[i] && !taken[j] {
            taken[i] = true;
            taken[j] = true;
            pairs.push((i, j));
        }
    }
    let solo = (0..n).filter(|&i| !taken[i]).collect();
    Pairing { pairs, solo }
}
