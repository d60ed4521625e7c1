//! Flock statistics evaluated on snapshots.
//!
//! "Facing the same direction" is always judged with one shared tolerance,
//! [`AlignmentTolerance`], so flock counts, convergence and control stay
//! comparable.

use alloc::vec::Vec;
use core::fmt;

use crate::agent::AgentState;
use crate::geom::{angle_diff, circular_mean, Vec2};
use crate::math::{normalize_angle, PI, TAU};
use crate::sim::{NeighborMode, Neighborhoods, SimState};
use crate::world::WorldSpec;

/// Angular tolerance in radians, strictly between 0 and π.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct AlignmentTolerance(f64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ToleranceOutOfRange;

impl fmt::Display for ToleranceOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("alignment tolerance must lie in (0, π)")
    }
}

impl AlignmentTolerance {
    pub const DEFAULT: AlignmentTolerance = AlignmentTolerance(0.1);

    pub fn new(radians: f64) -> Result<Self, ToleranceOutOfRange> {
        if radians > 0.0 && radians < PI {
            Ok(AlignmentTolerance(radians))
        } else {
            Err(ToleranceOutOfRange)
        }
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl Default for AlignmentTolerance {
    fn default() -> Self {
        AlignmentTolerance::DEFAULT
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MetricOptions {
    pub tolerance: AlignmentTolerance,
    /// Count flocks on proximity alone, ignoring headings.
    pub proximity_only_flocks: bool,
}

/// One sampled row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricSample {
    pub step: u64,
    pub flock_count: usize,
    pub lone_count: usize,
    /// `lone_count` over all agents (both kinds).
    pub lone_fraction: f64,
    /// Largest group of flock members within one tolerance window.
    pub max_aligned_count: usize,
    pub controlled_count: usize,
    /// Agents outside the nominal grid (open worlds only).
    pub offworld_count: usize,
}

/// Disjoint sets with union by size and path halving.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect(), size: alloc::vec![1; n] }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            core::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }

    /// Component label per element, numbered by first appearance.
    pub fn labels(&mut self) -> Vec<usize> {
        let n = self.parent.len();
        let mut label_of_root = alloc::vec![usize::MAX; n];
        let mut next = 0;
        (0..n)
            .map(|i| {
                let r = self.find(i);
                if label_of_root[r] == usize::MAX {
                    label_of_root[r] = next;
                    next += 1;
                }
                label_of_root[r]
            })
            .collect()
    }
}

/// Neighbor lists shared by all metrics of one snapshot.
struct Snapshot<'a> {
    agents: &'a [AgentState],
    nbrs: Neighborhoods,
}

impl<'a> Snapshot<'a> {
    fn new(agents: &'a [AgentState], world: &WorldSpec, radius: f64, mode: NeighborMode) -> Self {
        let positions: Vec<Vec2> = agents.iter().map(|a| a.position).collect();
        let index = match mode {
            NeighborMode::Indexed => crate::spatial::SpatialIndex::build(&positions, world, radius),
            NeighborMode::BruteForce => crate::spatial::SpatialIndex::flat(positions.len()),
        };
        let nbrs = Neighborhoods::compute(agents, &positions, world, &index, radius);
        Snapshot { agents, nbrs }
    }

    /// Component labels of the neighbor graph restricted to edges passing
    /// `keep`.
    fn components(&self, mut keep: impl FnMut(usize, usize) -> bool) -> Vec<usize> {
        let mut uf = UnionFind::new(self.agents.len());
        for i in 0..self.agents.len() {
            for j in self.nbrs.of(i) {
                if i < j && keep(i, j) {
                    uf.union(i, j);
                }
            }
        }
        uf.labels()
    }

    fn flock_count(&self, tol: AlignmentTolerance, proximity_only: bool) -> usize {
        let agents = self.agents;
        let labels = self.components(|i, j| {
            proximity_only || angle_diff(agents[i].heading, agents[j].heading).abs() <= tol.radians()
        });
        let mut sizes = alloc::vec![0usize; agents.len()];
        for &l in &labels {
            sizes[l] += 1;
        }
        sizes.iter().filter(|&&s| s >= 2).count()
    }

    fn lone_count(&self) -> usize {
        (0..self.agents.len()).filter(|&i| self.nbrs.count(i) == 0).count()
    }

    fn controlled_count(&self, tol: AlignmentTolerance) -> usize {
        let agents = self.agents;
        let labels = self.components(|_, _| true);
        let n = agents.len();
        // influencer members of each component, by id
        let mut members: Vec<Vec<usize>> = alloc::vec![Vec::new(); n];
        for (i, a) in agents.iter().enumerate() {
            if a.is_influencer() {
                members[labels[i]].push(i);
            }
        }
        let reference: Vec<Option<f64>> = members
            .iter_mut()
            .map(|m| {
                if m.is_empty() {
                    return None;
                }
                m.sort_unstable_by_key(|&i| agents[i].id);
                Some(circular_mean(m.iter().map(|&i| agents[i].heading)).unwrap_or(agents[m[0]].heading))
            })
            .collect();
        agents
            .iter()
            .enumerate()
            .filter(|(i, a)| {
                !a.is_influencer()
                    && reference[labels[*i]].is_some_and(|h| angle_diff(a.heading, h).abs() <= tol.radians())
            })
            .count()
    }
}

/// Connected components of the proximity graph (edges at distance ≤ `radius`,
/// both agent kinds). Each component lists agent ids ascending; components are
/// ordered by their smallest id.
pub fn proximity_components(agents: &[AgentState], radius: f64, world: &WorldSpec) -> Vec<Vec<u32>> {
    let snap = Snapshot::new(agents, world, radius, NeighborMode::Indexed);
    let labels = snap.components(|_, _| true);
    let mut groups: Vec<Vec<u32>> = alloc::vec![Vec::new(); agents.len()];
    for (i, &l) in labels.iter().enumerate() {
        groups[l].push(agents[i].id);
    }
    let mut groups: Vec<Vec<u32>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    for g in groups.iter_mut() {
        g.sort_unstable();
    }
    groups.sort_unstable_by_key(|g| g[0]);
    groups
}

/// Components of size ≥ 2 whose edges need both proximity (≤ `radius`) and
/// heading agreement (`|angle_diff| ≤ tol`).
pub fn flock_count(agents: &[AgentState], radius: f64, tol: AlignmentTolerance, world: &WorldSpec) -> usize {
    Snapshot::new(agents, world, radius, NeighborMode::Indexed).flock_count(tol, false)
}

/// Agents with nobody within `radius`, regardless of heading.
pub fn lone_count(agents: &[AgentState], radius: f64, world: &WorldSpec) -> usize {
    Snapshot::new(agents, world, radius, NeighborMode::Indexed).lone_count()
}

/// Flock members in a proximity component that contains an influencer, whose
/// heading is within `tol` of the circular mean of that component's influencer
/// headings.
pub fn controlled_count(agents: &[AgentState], radius: f64, tol: AlignmentTolerance, world: &WorldSpec) -> usize {
    Snapshot::new(agents, world, radius, NeighborMode::Indexed).controlled_count(tol)
}

/// Largest number of headings inside one closed arc of width `tol`, i.e.
/// within `tol/2` of a common direction, and the center of one such arc.
///
/// Sorted circular sweep, `O(n log n)`. `None` for no headings.
pub fn max_aligned_group(headings: &[f64], tol: AlignmentTolerance) -> Option<(usize, f64)> {
    if headings.is_empty() {
        return None;
    }
    let width = tol.radians();
    let mut sorted: Vec<f64> = headings.iter().map(|&h| normalize_angle(h)).collect();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();

    let mut best = (1, sorted[0]);
    // `len` = how many sorted headings, starting at i, fit in [θ_i, θ_i + width]
    let mut len = 1;
    for i in 0..n {
        len = len.max(1);
        while len < n && arc_offset(sorted[i], sorted[(i + len) % n]) <= width {
            len += 1;
        }
        if len > best.0 {
            // midpoint of the group's extreme headings
            let span = arc_offset(sorted[i], sorted[(i + len - 1) % n]);
            best = (len, sorted[i] + 0.5 * span);
        }
        len -= 1;
    }
    Some((best.0, normalize_angle(best.1)))
}

/// Counterclockwise offset from `from` to `to`, both in `[0, 2π)`.
#[inline]
pub fn arc_offset(from: f64, to: f64) -> f64 {
    if to >= from {
        to - from
    } else {
        to - from + TAU
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    /// First sampled step at which half the flock was aligned.
    At(u64),
    /// Never reached; carries the last sampled step.
    Censored(u64),
}

impl Convergence {
    pub fn step(self) -> u64 {
        match self {
            Convergence::At(s) | Convergence::Censored(s) => s,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Convergence::Censored(_))
    }
}

/// Agents needed for 50% convergence: `⌈n_rv / 2⌉`.
#[inline]
pub fn convergence_threshold(n_rv: usize) -> usize {
    n_rv.div_ceil(2)
}

/// First sample (in step order) with `max_aligned_count ≥ ⌈n_rv/2⌉`.
pub fn convergence_step(samples: &[MetricSample], n_rv: usize) -> Convergence {
    let need = convergence_threshold(n_rv);
    samples
        .iter()
        .find(|s| s.max_aligned_count >= need)
        .map(|s| Convergence::At(s.step))
        .unwrap_or_else(|| Convergence::Censored(samples.last().map_or(0, |s| s.step)))
}

/// All metrics for the current state of `sim`.
pub fn sample(sim: &SimState, opts: &MetricOptions) -> MetricSample {
    let agents = &sim.agents;
    let world = &sim.world;
    let snap = Snapshot::new(agents, world, world.neighborhood_radius, sim.neighbor_mode);
    let lone = snap.lone_count();
    let rv_headings: Vec<f64> = agents.iter().filter(|a| !a.is_influencer()).map(|a| a.heading).collect();
    MetricSample {
        step: sim.step,
        flock_count: snap.flock_count(opts.tolerance, opts.proximity_only_flocks),
        lone_count: lone,
        lone_fraction: if agents.is_empty() { 0.0 } else { lone as f64 / agents.len() as f64 },
        max_aligned_count: max_aligned_group(&rv_headings, opts.tolerance).map_or(0, |g| g.0),
        controlled_count: snap.controlled_count(opts.tolerance),
        offworld_count: agents.iter().filter(|a| world.is_off_world(a.position)).count(),
    }
}
