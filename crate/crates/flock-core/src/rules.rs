//! The Reynolds-Vicsek alignment update and constant-speed motion.

use crate::geom::{angle_diff, wrap_position, Vec2};
use crate::math;
use crate::world::WorldSpec;

/// Fraction of the mean neighbor offset applied each step.
pub const MOMENTUM: f64 = 0.5;

/// Next heading of an agent with heading `heading` and the given neighbor
/// headings: `θ + ½·mean(angle_diff(θ_j, θ))`, normalized to `[0, 2π)`.
///
/// An empty neighborhood leaves the heading unchanged. Neighbor order affects
/// only the last bits of the sum; the simulation always passes neighbors in
/// ascending id order.
pub fn rv_next_heading<I>(heading: f64, neighbor_headings: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = 0.0;
    let mut n = 0usize;
    for h in neighbor_headings {
        sum += angle_diff(h, heading);
        n += 1;
    }
    if n == 0 {
        return math::normalize_angle(heading);
    }
    math::normalize_angle(heading + MOMENTUM * sum / n as f64)
}

/// Moves `position` by `world.speed` along `heading`, wrapping on a torus.
#[inline]
pub fn advance_position(position: Vec2, heading: f64, world: &WorldSpec) -> Vec2 {
    wrap_position(position + Vec2::from_polar(world.speed, heading), world)
}
