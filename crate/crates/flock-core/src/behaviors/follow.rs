//! Pieces of the follow-then-influence (multistep) controller.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use crate::agent::AgentState;
use crate::geom::{circular_mean, Vec2};
use crate::spatial::{within, SpatialIndex};
use crate::world::WorldSpec;

/// Reynolds-Vicsek agents an influencer believes are path-connected to it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalConnected {
    /// Agent indices, ascending.
    pub rv: Vec<usize>,
}

impl LocalConnected {
    #[inline]
    pub fn count(&self) -> usize {
        self.rv.len()
    }
}

/// Breadth-first search from `influencer` over agents inside its sensing ball
/// (radius 2r), with edges between agents at distance ≤ r. Any agent kind can
/// relay a path; only Reynolds-Vicsek agents are counted.
pub fn local_connected(
    agents: &[AgentState],
    positions: &[Vec2],
    world: &WorldSpec,
    index: &SpatialIndex,
    influencer: usize,
) -> LocalConnected {
    let r = world.neighborhood_radius;
    let sense = world.sensing_radius();
    let origin = positions[influencer];

    let mut seen = alloc::vec![influencer];
    let mut queue = VecDeque::from([influencer]);
    let mut nbrs = Vec::new();
    while let Some(u) = queue.pop_front() {
        nbrs.clear();
        index.query_into(positions, world, positions[u], r, Some(u), &mut nbrs);
        for &v in &nbrs {
            if !seen.contains(&v) && within(origin, positions[v], world, sense) {
                seen.push(v);
                queue.push_back(v);
            }
        }
    }
    let mut rv: Vec<usize> = seen.into_iter().filter(|&i| !agents[i].is_influencer()).collect();
    rv.sort_unstable();
    LocalConnected { rv }
}

/// Goal direction adopted when the multistep latch fires: the circular mean of
/// the connected agents' headings, plus the influencers' own headings when
/// `influencer_headings` is non-empty. A degenerate mean yields `fallback`.
pub fn latch_goal<I, J>(connected_headings: I, influencer_headings: J, fallback: f64) -> f64
where
    I: IntoIterator<Item = f64>,
    J: IntoIterator<Item = f64>,
{
    circular_mean(connected_headings.into_iter().chain(influencer_headings)).unwrap_or(fallback)
}
