//! Planar vectors, toroidal geometry and circular statistics.

use core::fmt;
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use crate::math::{self, PI, TAU};
use crate::world::{Topology, WorldSpec};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Vector of length `len` pointing along `theta`.
    #[inline]
    pub fn from_polar(len: f64, theta: f64) -> Self {
        Vec2::new(len * math::cos(theta), len * math::sin(theta))
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    /// Polar angle in `[0, 2π)`. The zero vector maps to 0.
    #[inline]
    pub fn angle(self) -> f64 {
        math::normalize_angle(math::atan2(self.y, self.x))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, k: f64) -> Vec2 {
        Vec2::new(self.x * k, self.y * k)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, k: f64) -> Vec2 {
        Vec2::new(self.x / k, self.y / k)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Folds a position back into `[0, w) × [0, h)` on a torus; identity on open
/// worlds.
pub fn wrap_position(p: Vec2, world: &WorldSpec) -> Vec2 {
    match world.topology {
        Topology::Toroidal => Vec2::new(
            math::rem_euclid(p.x, world.width),
            math::rem_euclid(p.y, world.height),
        ),
        Topology::Open => p,
    }
}

#[inline]
fn min_image(d: f64, dim: f64) -> f64 {
    // result in [-dim/2, dim/2); fmod is odd, so delta(a, b) = -delta(b, a)
    // away from the half-width seam and distances are exactly symmetric
    let half = 0.5 * dim;
    let r = libm::fmod(d, dim);
    if r >= half {
        r - dim
    } else if r < -half {
        r + dim
    } else {
        r
    }
}

/// Displacement `b - a`, using the minimum image on a torus.
pub fn torus_delta(a: Vec2, b: Vec2, world: &WorldSpec) -> Vec2 {
    let d = b - a;
    match world.topology {
        Topology::Toroidal => Vec2::new(min_image(d.x, world.width), min_image(d.y, world.height)),
        Topology::Open => d,
    }
}

#[inline]
pub fn distance_sq(a: Vec2, b: Vec2, world: &WorldSpec) -> f64 {
    torus_delta(a, b, world).norm_sq()
}

#[inline]
pub fn distance(a: Vec2, b: Vec2, world: &WorldSpec) -> f64 {
    torus_delta(a, b, world).norm()
}

/// Signed difference `a - b` wrapped into `(-π, π]`.
#[inline]
pub fn angle_diff(a: f64, b: f64) -> f64 {
    let d = math::rem_euclid(a - b, TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// The headings cancel out (zero resultant), so no mean direction exists.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateMean;

impl fmt::Display for DegenerateMean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("circular mean undefined: unit vectors sum to zero")
    }
}

/// Resultant norms below this are treated as zero.
pub const DEGENERATE_RESULTANT: f64 = 1e-9;

/// Direction of the sum of unit vectors, in `[0, 2π)`.
///
/// Empty input and inputs whose unit vectors cancel both yield
/// [`DegenerateMean`].
pub fn circular_mean<I>(headings: I) -> Result<f64, DegenerateMean>
where
    I: IntoIterator<Item = f64>,
{
    let mut sum = Vec2::ZERO;
    let mut n = 0usize;
    for h in headings {
        sum += Vec2::from_polar(1.0, h);
        n += 1;
    }
    if n == 0 || sum.norm() <= DEGENERATE_RESULTANT * n as f64 {
        return Err(DegenerateMean);
    }
    Ok(sum.angle())
}
