//! Initial positions for influencers and Reynolds-Vicsek agents.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_core::RngCore;

use crate::agent::AgentState;
use crate::geom::Vec2;
use crate::math::{self, TAU};
use crate::seed::unit_f64;
use crate::world::{Setting, WorldSpec, HERD_DISC_RADIUS};

/// `2π / φ²`, the sunflower-spiral angular step.
pub const GOLDEN_ANGLE: f64 = 2.399_963_229_728_653;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Random,
    Grid,
    KMeans,
    CircleRandom,
    CircleGrid,
    CircleBorder,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Random,
        Strategy::Grid,
        Strategy::KMeans,
        Strategy::CircleRandom,
        Strategy::CircleGrid,
        Strategy::CircleBorder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::Grid => "grid",
            Strategy::KMeans => "kmeans",
            Strategy::CircleRandom => "circle-random",
            Strategy::CircleGrid => "circle-grid",
            Strategy::CircleBorder => "circle-border",
        }
    }

    pub fn is_circular(self) -> bool {
        matches!(self, Strategy::CircleRandom | Strategy::CircleGrid | Strategy::CircleBorder)
    }

    /// Circular strategies need the open herd world; `random` and `grid` need a
    /// torus. k-means works everywhere.
    pub fn valid_in(self, setting: Setting) -> bool {
        match self {
            Strategy::KMeans => true,
            s if s.is_circular() => setting == Setting::Herd,
            _ => setting != Setting::Herd,
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UnknownStrategy;

impl fmt::Display for UnknownStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown placement strategy")
    }
}

impl FromStr for Strategy {
    type Err = UnknownStrategy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL.into_iter().find(|v| v.name() == s).ok_or(UnknownStrategy)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KMeansParams {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams { max_iterations: 100, tolerance: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlacementSpec {
    pub strategy: Strategy,
    pub origin: Vec2,
    /// Radius of the circular strategies.
    pub radius: f64,
    pub count: usize,
    pub kmeans: KMeansParams,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlacementError {
    ZeroCount,
    NonPositiveRadius,
    NoReferencePoints,
    ZeroIterations,
}

impl fmt::Display for PlacementError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlacementError::ZeroCount => f.write_str("placement count must be at least 1"),
            PlacementError::NonPositiveRadius => f.write_str("placement radius must be positive"),
            PlacementError::NoReferencePoints => f.write_str("k-means placement needs at least one agent position"),
            PlacementError::ZeroIterations => f.write_str("k-means needs at least one iteration"),
        }
    }
}

impl PlacementSpec {
    /// Places `count` influencers. `rv_positions` is only read by k-means.
    pub fn place<R: RngCore + ?Sized>(
        &self,
        world: &WorldSpec,
        rv_positions: &[Vec2],
        rng: &mut R,
    ) -> Result<Vec<Vec2>, PlacementError> {
        if self.count == 0 {
            return Err(PlacementError::ZeroCount);
        }
        if self.strategy.is_circular() && !(self.radius > 0.0) {
            return Err(PlacementError::NonPositiveRadius);
        }
        Ok(match self.strategy {
            Strategy::Random => place_random(self.count, Region::Rect { width: world.width, height: world.height }, rng),
            Strategy::Grid => place_grid(self.count, world),
            Strategy::KMeans => place_kmeans(self.count, rv_positions, &self.kmeans, rng)?.centers,
            Strategy::CircleRandom => {
                place_random(self.count, Region::Disc { center: self.origin, radius: self.radius }, rng)
            }
            Strategy::CircleGrid => place_sunflower(self.count, self.origin, self.radius),
            Strategy::CircleBorder => place_circle_border(self.count, self.origin, self.radius),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// `[0, width) × [0, height)`.
    Rect { width: f64, height: f64 },
    Disc { center: Vec2, radius: f64 },
}

impl Region {
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec2 {
        match *self {
            Region::Rect { width, height } => {
                let x = unit_f64(rng) * width;
                let y = unit_f64(rng) * height;
                // u < 1 but u·w can round up to w
                Vec2::new(if x < width { x } else { 0.0 }, if y < height { y } else { 0.0 })
            }
            Region::Disc { center, radius } => {
                // sqrt keeps the density uniform in area
                let rho = radius * math::sqrt(unit_f64(rng));
                center + Vec2::from_polar(rho, TAU * unit_f64(rng))
            }
        }
    }
}

pub fn place_random<R: RngCore + ?Sized>(count: usize, region: Region, rng: &mut R) -> Vec<Vec2> {
    (0..count).map(|_| region.sample(rng)).collect()
}

/// Cell centers of an `m×m` lattice (`m = ⌈√count⌉`), filled row-major.
pub fn place_grid(count: usize, world: &WorldSpec) -> Vec<Vec2> {
    let mut m = math::ceil(math::sqrt(count as f64)) as usize;
    // guard against sqrt rounding for perfect squares
    while m * m < count {
        m += 1;
    }
    while m > 1 && (m - 1) * (m - 1) >= count {
        m -= 1;
    }
    let dx = world.width / m as f64;
    let dy = world.height / m as f64;
    (0..count)
        .map(|i| {
            let (row, col) = (i / m, i % m);
            Vec2::new((col as f64 + 0.5) * dx, (row as f64 + 0.5) * dy)
        })
        .collect()
}

/// `count` equally spaced points on the circle, the first at angle 0.
pub fn place_circle_border(count: usize, origin: Vec2, radius: f64) -> Vec<Vec2> {
    (0..count)
        .map(|k| origin + Vec2::from_polar(radius, TAU * k as f64 / count as f64))
        .collect()
}

/// Sunflower spiral: the `n`-th point (1-based) sits at polar
/// `(c·√n, n·GOLDEN_ANGLE)` with `c = radius/√count`, so the last one lands on
/// the circle.
pub fn place_sunflower(count: usize, origin: Vec2, radius: f64) -> Vec<Vec2> {
    let c = radius / math::sqrt(count as f64);
    (1..=count)
        .map(|n| {
            let rho = if n == count { radius } else { c * math::sqrt(n as f64) };
            origin + Vec2::from_polar(rho, math::normalize_angle(n as f64 * GOLDEN_ANGLE))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct KMeansResult {
    pub centers: Vec<Vec2>,
    pub assignments: Vec<usize>,
    pub iterations: usize,
    /// Sum of squared distances to assigned centers after each iteration.
    pub objective_history: Vec<f64>,
}

fn nearest(p: Vec2, centers: &[Vec2]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, &c) in centers.iter().enumerate() {
        let d = (p - c).norm_sq();
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

/// Lloyd's algorithm in plain Euclidean coordinates.
///
/// Centers start at uniform random points of the bounding box of `points`.
/// A cluster left empty after assignment is re-seeded on the point farthest
/// from its current center (each point claimed at most once per pass). Stops
/// at an assignment fixpoint, when every center moves less than `tolerance`,
/// or after `max_iterations`.
pub fn place_kmeans<R: RngCore + ?Sized>(
    k: usize,
    points: &[Vec2],
    params: &KMeansParams,
    rng: &mut R,
) -> Result<KMeansResult, PlacementError> {
    if k == 0 {
        return Err(PlacementError::ZeroCount);
    }
    if points.is_empty() {
        return Err(PlacementError::NoReferencePoints);
    }
    if params.max_iterations == 0 {
        return Err(PlacementError::ZeroIterations);
    }

    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let extent = hi - lo;
    let mut centers: Vec<Vec2> = (0..k)
        .map(|_| lo + Vec2::new(unit_f64(rng) * extent.x, unit_f64(rng) * extent.y))
        .collect();

    let mut assignments: Vec<usize> = alloc::vec![usize::MAX; points.len()];
    let mut objective_history = Vec::new();
    let mut iterations = 0;

    while iterations < params.max_iterations {
        iterations += 1;

        let mut changed = false;
        let mut dist = Vec::with_capacity(points.len());
        for (i, &p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centers);
            changed |= assignments[i] != c;
            assignments[i] = c;
            dist.push(d);
        }

        let mut sums = alloc::vec![Vec2::ZERO; k];
        let mut counts = alloc::vec![0usize; k];
        for (i, &p) in points.iter().enumerate() {
            sums[assignments[i]] += p;
            counts[assignments[i]] += 1;
        }

        let mut reseeded = false;
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let far = (0..points.len())
                .filter(|&i| dist[i] > 0.0)
                .max_by(|&a, &b| dist[a].total_cmp(&dist[b]).then(b.cmp(&a)));
            let Some(far) = far else { continue };
            let old = assignments[far];
            counts[old] -= 1;
            sums[old] = sums[old] - points[far];
            assignments[far] = c;
            counts[c] = 1;
            sums[c] = points[far];
            dist[far] = 0.0;
            reseeded = true;
            changed = true;
        }

        let mut max_shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            let next = sums[c] / counts[c] as f64;
            max_shift = max_shift.max((next - centers[c]).norm());
            centers[c] = next;
        }

        objective_history.push(
            points.iter().zip(&assignments).map(|(&p, &c)| (p - centers[c]).norm_sq()).sum(),
        );

        if !reseeded && (!changed || max_shift < params.tolerance) {
            break;
        }
    }

    Ok(KMeansResult { centers, assignments, iterations, objective_history })
}

/// `count` Reynolds-Vicsek agents with ids `0..count`: uniform over the grid
/// for toroidal settings, uniform over the radius-500 disc at the center for
/// the herd setting. Headings are uniform on `[0, 2π)`.
pub fn init_rv_agents<R: RngCore + ?Sized>(setting: Setting, count: usize, rng: &mut R) -> Vec<AgentState> {
    let world = setting.world();
    let region = match setting {
        Setting::Small | Setting::Large => Region::Rect { width: world.width, height: world.height },
        Setting::Herd => Region::Disc { center: world.center(), radius: HERD_DISC_RADIUS },
    };
    (0..count)
        .map(|i| {
            let p = region.sample(rng);
            AgentState::rv(i as u32, p, TAU * unit_f64(rng))
        })
        .collect()
}
