//! Heading controllers for influencing agents.
//!
//! Every controller is a pure function of the influencer's local view and its
//! carried [`Phase`](crate::agent::Phase). The stepping loop in [`crate::sim`]
//! assembles the views and performs the one global reduction (the multistep
//! connected-agent sum).

mod directional;
mod follow;
mod stationary;

pub use directional::{
    act_coordinated, act_face, act_lookahead, act_offset_momentum, build_probes, candidate_headings,
    pair_influencers, probe_objective, Pairing, Probe, ProbeInput,
};
pub use follow::{latch_goal, local_connected, LocalConnected};
pub use stationary::{
    act_circle, act_polygon, multicircle_step, polygon_initial_target, polygon_vertex, UndefinedTangent,
};

use core::fmt;
use core::str::FromStr;

use crate::agent::{MulticircleStage, MultistepPhase, Phase};
use crate::geom::Vec2;
use crate::world::Setting;

/// Directional behavior run after the multistep latch fires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SecondStage {
    Face,
    OffsetMomentum,
    Lookahead,
    Coordinated,
}

impl SecondStage {
    pub const ALL: [SecondStage; 4] =
        [SecondStage::Face, SecondStage::OffsetMomentum, SecondStage::Lookahead, SecondStage::Coordinated];

    pub fn name(self) -> &'static str {
        match self {
            SecondStage::Face => "face",
            SecondStage::OffsetMomentum => "offset-momentum",
            SecondStage::Lookahead => "lookahead",
            SecondStage::Coordinated => "coordinated",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BehaviorKind {
    Face,
    OffsetMomentum,
    Lookahead,
    Coordinated,
    Multistep(SecondStage),
    Circle,
    Polygon,
    Multicircle,
}

impl BehaviorKind {
    /// The directional behavior this kind runs when it is influencing.
    pub fn directional(self) -> Option<SecondStage> {
        match self {
            BehaviorKind::Face => Some(SecondStage::Face),
            BehaviorKind::OffsetMomentum => Some(SecondStage::OffsetMomentum),
            BehaviorKind::Lookahead => Some(SecondStage::Lookahead),
            BehaviorKind::Coordinated => Some(SecondStage::Coordinated),
            BehaviorKind::Multistep(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_stationary(self) -> bool {
        matches!(self, BehaviorKind::Circle | BehaviorKind::Polygon | BehaviorKind::Multicircle)
    }

    /// Multistep needs the toroidal settings: on an open world the connected
    /// sum may never reach the threshold. Stationary behaviors circle the herd
    /// origin and only make sense on the open world.
    pub fn valid_in(self, setting: Setting) -> bool {
        match self {
            BehaviorKind::Multistep(_) => setting.is_toroidal(),
            k if k.is_stationary() => setting == Setting::Herd,
            _ => true,
        }
    }

    pub fn default_candidates(self) -> usize {
        match self {
            BehaviorKind::Coordinated | BehaviorKind::Multistep(SecondStage::Coordinated) => 16,
            _ => 64,
        }
    }
}

impl fmt::Display for BehaviorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BehaviorKind::Face => f.write_str("face"),
            BehaviorKind::OffsetMomentum => f.write_str("offset-momentum"),
            BehaviorKind::Lookahead => f.write_str("lookahead"),
            BehaviorKind::Coordinated => f.write_str("coordinated"),
            BehaviorKind::Multistep(s) => write!(f, "multistep:{}", s.name()),
            BehaviorKind::Circle => f.write_str("circle"),
            BehaviorKind::Polygon => f.write_str("polygon"),
            BehaviorKind::Multicircle => f.write_str("multicircle"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownBehavior;

impl fmt::Display for UnknownBehavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown behavior")
    }
}

impl FromStr for BehaviorKind {
    type Err = UnknownBehavior;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let stage = |name: &str| SecondStage::ALL.into_iter().find(|v| v.name() == name);
        Ok(match s {
            "circle" => BehaviorKind::Circle,
            "polygon" => BehaviorKind::Polygon,
            "multicircle" => BehaviorKind::Multicircle,
            "multistep" => BehaviorKind::Multistep(SecondStage::Face),
            _ => match s.strip_prefix("multistep:") {
                Some(rest) => BehaviorKind::Multistep(stage(rest).ok_or(UnknownBehavior)?),
                None => match stage(s).ok_or(UnknownBehavior)? {
                    SecondStage::Face => BehaviorKind::Face,
                    SecondStage::OffsetMomentum => BehaviorKind::OffsetMomentum,
                    SecondStage::Lookahead => BehaviorKind::Lookahead,
                    SecondStage::Coordinated => BehaviorKind::Coordinated,
                },
            },
        })
    }
}

/// Controller selection plus every controller parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BehaviorSpec {
    pub kind: BehaviorKind,
    /// Goal direction θ* for the directional behaviors.
    pub goal: f64,
    /// Multistep latch threshold on the summed connected-agent estimates.
    pub threshold: usize,
    /// Whether the multistep goal averages the influencers' own headings in.
    pub include_influencer_headings: bool,
    /// Candidate headings per agent for lookahead and coordinated.
    pub candidates: usize,
    pub polygon_sides: usize,
    /// Circle/polygon radius. `None` means each influencer uses its starting
    /// distance from the origin.
    pub circle_radius: Option<f64>,
    /// Multicircle final radius.
    pub final_radius: f64,
    /// Center of the stationary behaviors.
    pub origin: Vec2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BehaviorError {
    TooFewCandidates,
    TooFewSides,
    ZeroThreshold,
    NonPositiveRadius,
    FinalRadiusNotLarger,
}

impl fmt::Display for BehaviorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BehaviorError::TooFewCandidates => f.write_str("lookahead needs at least 2 candidate headings"),
            BehaviorError::TooFewSides => f.write_str("polygon needs at least 3 sides"),
            BehaviorError::ZeroThreshold => f.write_str("multistep threshold must be at least 1"),
            BehaviorError::NonPositiveRadius => f.write_str("circle radii must be positive"),
            BehaviorError::FinalRadiusNotLarger => {
                f.write_str("multicircle final radius must exceed the circle radius")
            }
        }
    }
}

impl BehaviorSpec {
    pub fn new(kind: BehaviorKind) -> Self {
        BehaviorSpec {
            kind,
            goal: 0.0,
            threshold: 1,
            include_influencer_headings: true,
            candidates: kind.default_candidates(),
            polygon_sides: 10,
            circle_radius: None,
            final_radius: 900.0,
            origin: Setting::Herd.world().center(),
        }
    }

    pub fn with_goal(mut self, goal: f64) -> Self {
        self.goal = crate::math::normalize_angle(goal);
        self
    }

    pub fn validate(&self) -> Result<(), BehaviorError> {
        if self.candidates < 2 {
            return Err(BehaviorError::TooFewCandidates);
        }
        if self.polygon_sides < 3 {
            return Err(BehaviorError::TooFewSides);
        }
        if self.threshold < 1 {
            return Err(BehaviorError::ZeroThreshold);
        }
        if !(self.final_radius > 0.0) || self.circle_radius.is_some_and(|r| !(r > 0.0)) {
            return Err(BehaviorError::NonPositiveRadius);
        }
        if self.kind == BehaviorKind::Multicircle && self.circle_radius.is_some_and(|r| self.final_radius <= r) {
            return Err(BehaviorError::FinalRadiusNotLarger);
        }
        Ok(())
    }

    /// Phase an influencer starts in, given its placed position.
    pub fn initial_phase(&self, position: Vec2) -> Phase {
        let radius = self.circle_radius.unwrap_or_else(|| (position - self.origin).norm());
        match self.kind {
            BehaviorKind::Circle => Phase::Circle { radius },
            BehaviorKind::Polygon => Phase::Polygon {
                radius,
                target: polygon_initial_target(position, self.origin, self.polygon_sides),
            },
            BehaviorKind::Multicircle => Phase::Multicircle { stage: MulticircleStage::CirclingInitial, radius },
            BehaviorKind::Multistep(_) => Phase::Multistep { phase: MultistepPhase::Follow, partner: None },
            // partners are assigned once all influencers are placed
            BehaviorKind::Coordinated => Phase::Coordinated { partner: None },
            _ => Phase::None,
        }
    }
}
