//! World geometry and the three preset settings.

use core::fmt;
use core::str::FromStr;

use crate::geom::Vec2;

/// Agent speed shared by every agent in every preset.
pub const DEFAULT_SPEED: f64 = 0.7;

/// Herd-setting starting disc radius around the world center.
pub const HERD_DISC_RADIUS: f64 = 500.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Topology {
    /// Edges wrap around.
    Toroidal,
    /// Unbounded plane; the nominal grid is used only to report "lost" agents.
    Open,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldSpec {
    pub width: f64,
    pub height: f64,
    pub topology: Topology,
    pub neighborhood_radius: f64,
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WorldError {
    NonPositiveDimension,
    NonPositiveRadius,
    NonPositiveSpeed,
}

impl fmt::Display for WorldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorldError::NonPositiveDimension => f.write_str("world width and height must be positive"),
            WorldError::NonPositiveRadius => f.write_str("neighborhood radius must be positive"),
            WorldError::NonPositiveSpeed => f.write_str("speed must be positive"),
        }
    }
}

impl WorldSpec {
    pub fn new(
        width: f64,
        height: f64,
        topology: Topology,
        neighborhood_radius: f64,
        speed: f64,
    ) -> Result<Self, WorldError> {
        // NaN fails every comparison, so test the positive form.
        if !(width > 0.0 && height > 0.0) {
            return Err(WorldError::NonPositiveDimension);
        }
        if !(neighborhood_radius > 0.0) {
            return Err(WorldError::NonPositiveRadius);
        }
        if !(speed > 0.0) {
            return Err(WorldError::NonPositiveSpeed);
        }
        Ok(WorldSpec { width, height, topology, neighborhood_radius, speed })
    }

    /// 150×150 torus, r = 20.
    pub const fn small() -> Self {
        WorldSpec {
            width: 150.0,
            height: 150.0,
            topology: Topology::Toroidal,
            neighborhood_radius: 20.0,
            speed: DEFAULT_SPEED,
        }
    }

    /// 1,000×1,000 torus, r = 10.
    pub const fn large() -> Self {
        WorldSpec {
            width: 1000.0,
            height: 1000.0,
            topology: Topology::Toroidal,
            neighborhood_radius: 10.0,
            speed: DEFAULT_SPEED,
        }
    }

    /// 5,000×5,000 open world, r = 10.
    pub const fn herd() -> Self {
        WorldSpec {
            width: 5000.0,
            height: 5000.0,
            topology: Topology::Open,
            neighborhood_radius: 10.0,
            speed: DEFAULT_SPEED,
        }
    }

    /// Influencers see twice as far as the neighborhood radius.
    #[inline]
    pub fn sensing_radius(&self) -> f64 {
        2.0 * self.neighborhood_radius
    }

    #[inline]
    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * self.width, 0.5 * self.height)
    }

    /// True when `p` lies outside the nominal grid. Always false on a torus.
    pub fn is_off_world(&self, p: Vec2) -> bool {
        match self.topology {
            Topology::Toroidal => false,
            Topology::Open => !(p.x >= 0.0 && p.x < self.width && p.y >= 0.0 && p.y < self.height),
        }
    }
}

/// The experimental settings. `Small` is the dense legacy setting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Setting {
    Small,
    Large,
    Herd,
}

impl Setting {
    pub const ALL: [Setting; 3] = [Setting::Small, Setting::Large, Setting::Herd];

    pub fn world(self) -> WorldSpec {
        match self {
            Setting::Small => WorldSpec::small(),
            Setting::Large => WorldSpec::large(),
            Setting::Herd => WorldSpec::herd(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Setting::Small => "small",
            Setting::Large => "large",
            Setting::Herd => "herd",
        }
    }

    pub fn is_toroidal(self) -> bool {
        self.world().topology == Topology::Toroidal
    }
}

impl fmt::Display for Setting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownSetting;

impl fmt::Display for UnknownSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown setting (expected small, large or herd)")
    }
}

impl FromStr for Setting {
    type Err = UnknownSetting;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Setting::ALL.into_iter().find(|v| v.name() == s).ok_or(UnknownSetting)
    }
}
