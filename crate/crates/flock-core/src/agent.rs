//! Per-agent state.

use crate::geom::Vec2;

pub type AgentId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AgentKind {
    /// Ordinary flock member following the alignment rule.
    ReynoldsVicsek,
    /// Controlled agent: same speed, twice the sensing radius.
    Influencer,
}

/// Follow-then-influence state for the multistep controller.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultistepPhase {
    Follow,
    /// Latched; carries the goal direction computed at the latch step.
    Influence { goal: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum MulticircleStage {
    CirclingInitial,
    Following,
    CirclingFinal,
}

/// Controller memory carried between steps. Stateless controllers use `None`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Phase {
    None,
    Circle { radius: f64 },
    Polygon { radius: f64, target: usize },
    Multicircle { stage: MulticircleStage, radius: f64 },
    Coordinated { partner: Option<AgentId> },
    Multistep { phase: MultistepPhase, partner: Option<AgentId> },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AgentState {
    pub id: AgentId,
    pub position: Vec2,
    /// Radians in `[0, 2π)`.
    pub heading: f64,
    pub kind: AgentKind,
    pub phase: Phase,
}

impl AgentState {
    pub fn rv(id: AgentId, position: Vec2, heading: f64) -> Self {
        AgentState {
            id,
            position,
            heading: crate::math::normalize_angle(heading),
            kind: AgentKind::ReynoldsVicsek,
            phase: Phase::None,
        }
    }

    pub fn influencer(id: AgentId, position: Vec2, heading: f64) -> Self {
        AgentState {
            kind: AgentKind::Influencer,
            ..AgentState::rv(id, position, heading)
        }
    }

    #[inline]
    pub fn is_influencer(&self) -> bool {
        self.kind == AgentKind::Influencer
    }

    /// Unit heading scaled by `speed`.
    #[inline]
    pub fn velocity(&self, speed: f64) -> Vec2 {
        Vec2::from_polar(speed, self.heading)
    }
}
