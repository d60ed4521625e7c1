//! Herd-keeping controllers: circle, polygon and multicircle. All of them
//! orbit a fixed origin counterclockwise.

use core::fmt;

use crate::agent::MulticircleStage;
use crate::geom::Vec2;
use crate::math::{self, TAU};

/// The agent sits exactly on the origin, so there is no tangent direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UndefinedTangent;

impl fmt::Display for UndefinedTangent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("circle heading undefined at the origin")
    }
}

/// Heading toward the waypoint one step of arc length ahead on the target
/// circle: polar angle `α + speed/radius`, where `α` is the agent's own polar
/// angle about `origin`.
pub fn act_circle(position: Vec2, origin: Vec2, radius: f64, speed: f64) -> Result<f64, UndefinedTangent> {
    let rel = position - origin;
    if rel.norm_sq() == 0.0 {
        return Err(UndefinedTangent);
    }
    let alpha = math::atan2(rel.y, rel.x);
    let waypoint = origin + Vec2::from_polar(radius, alpha + speed / radius);
    Ok((waypoint - position).angle())
}

/// Vertex `k` of the regular `sides`-gon of circumradius `radius`, vertex 0 at
/// polar angle 0.
#[inline]
pub fn polygon_vertex(origin: Vec2, radius: f64, sides: usize, k: usize) -> Vec2 {
    origin + Vec2::from_polar(radius, TAU * (k % sides) as f64 / sides as f64)
}

/// First vertex strictly counterclockwise of the agent's polar angle.
pub fn polygon_initial_target(position: Vec2, origin: Vec2, sides: usize) -> usize {
    let alpha = (position - origin).angle();
    let sector = math::floor(alpha / (TAU / sides as f64)) as usize;
    (sector + 1) % sides
}

/// Heads for the current target vertex, first advancing the target when the
/// agent is within one step (`speed`) of it. Returns the heading and the
/// possibly advanced target.
pub fn act_polygon(
    position: Vec2,
    origin: Vec2,
    radius: f64,
    sides: usize,
    speed: f64,
    target: usize,
) -> (f64, usize) {
    let mut target = target % sides;
    if (polygon_vertex(origin, radius, sides, target) - position).norm() <= speed {
        target = (target + 1) % sides;
    }
    ((polygon_vertex(origin, radius, sides, target) - position).angle(), target)
}

/// One multicircle decision.
///
/// Stages only move forward: circling at `radius` until a Reynolds-Vicsek
/// agent is within the neighborhood radius (`rv_in_range`), then following
/// (`follow_heading`, the plain alignment rule) until the agent is at least
/// `final_radius` from the origin, then circling at `final_radius`. Several
/// transitions may fire in one call. At the origin the circling stages keep
/// `current_heading`.
#[allow(clippy::too_many_arguments)]
pub fn multicircle_step(
    stage: MulticircleStage,
    position: Vec2,
    origin: Vec2,
    radius: f64,
    final_radius: f64,
    speed: f64,
    rv_in_range: bool,
    follow_heading: f64,
    current_heading: f64,
) -> (f64, MulticircleStage) {
    let mut stage = stage;
    if stage == MulticircleStage::CirclingInitial && rv_in_range {
        stage = MulticircleStage::Following;
    }
    if stage == MulticircleStage::Following && (position - origin).norm() >= final_radius {
        stage = MulticircleStage::CirclingFinal;
    }
    let heading = match stage {
        MulticircleStage::CirclingInitial => act_circle(position, origin, radius, speed).unwrap_or(current_heading),
        MulticircleStage::Following => follow_heading,
        MulticircleStage::CirclingFinal => {
            act_circle(position, origin, final_radius, speed).unwrap_or(current_heading)
        }
    };
    (heading, stage)
}
