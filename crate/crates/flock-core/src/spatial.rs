//! Fixed-radius neighbor search on a uniform cell grid.
//!
//! Agents are bucketed into square cells of side `cell_size` (the neighborhood
//! radius). On a torus the grid is dense and wraps; on an open world agents
//! can drift arbitrarily far, so occupied cells are kept as a sorted key list
//! and looked up by binary search.

use alloc::vec::Vec;

use crate::geom::{distance_sq, Vec2};
use crate::math;
use crate::world::{Topology, WorldSpec};

/// True when `a` and `b` are at distance `<= radius`. Every neighborhood test
/// in the crate goes through this predicate.
#[inline]
pub fn within(a: Vec2, b: Vec2, world: &WorldSpec, radius: f64) -> bool {
    distance_sq(a, b, world) <= radius * radius
}

#[derive(Clone, Debug)]
enum Layout {
    Dense {
        nx: usize,
        ny: usize,
        cell_w: f64,
        cell_h: f64,
        /// `starts[c]..starts[c + 1]` indexes `entries` for cell `c`.
        starts: Vec<u32>,
    },
    Sparse {
        /// `(row, column)` of each entry, sorted.
        keys: Vec<(i64, i64)>,
    },
    /// One bucket holding everything; every query scans all agents.
    Flat,
}

#[derive(Clone, Debug)]
pub struct SpatialIndex {
    cell_size: f64,
    layout: Layout,
    entries: Vec<u32>,
}

// Widens query bounds so rounding in `x ± radius` never drops a cell.
#[inline]
fn slack(x: f64, radius: f64) -> f64 {
    1e-9 * (1.0 + x.abs() + radius)
}

impl SpatialIndex {
    /// Buckets `positions` (indexed by their slice position).
    ///
    /// # Panics
    /// If `cell_size` is not positive or more than `u32::MAX` agents are given.
    pub fn build(positions: &[Vec2], world: &WorldSpec, cell_size: f64) -> Self {
        assert!(cell_size > 0.0, "cell size must be positive");
        assert!(positions.len() <= u32::MAX as usize);
        match world.topology {
            Topology::Toroidal => Self::build_dense(positions, world, cell_size),
            Topology::Open => Self::build_sparse(positions, cell_size),
        }
    }

    /// Degenerate index with a single bucket, equivalent to a brute-force
    /// scan. Used as the reference path in benchmarks.
    pub fn flat(len: usize) -> Self {
        assert!(len <= u32::MAX as usize);
        SpatialIndex { cell_size: f64::INFINITY, layout: Layout::Flat, entries: (0..len as u32).collect() }
    }

    fn build_dense(positions: &[Vec2], world: &WorldSpec, cell_size: f64) -> Self {
        let nx = (math::floor(world.width / cell_size) as usize).max(1);
        let ny = (math::floor(world.height / cell_size) as usize).max(1);
        let cell_w = world.width / nx as f64;
        let cell_h = world.height / ny as f64;
        let cell_of = |p: Vec2| {
            let cx = (math::floor(p.x / cell_w).max(0.0) as usize).min(nx - 1);
            let cy = (math::floor(p.y / cell_h).max(0.0) as usize).min(ny - 1);
            cy * nx + cx
        };

        // counting sort by cell
        let mut starts = alloc::vec![0u32; nx * ny + 1];
        let cells: Vec<usize> = positions.iter().map(|&p| cell_of(p)).collect();
        for &c in &cells {
            starts[c + 1] += 1;
        }
        for c in 0..nx * ny {
            starts[c + 1] += starts[c];
        }
        let mut fill = starts.clone();
        let mut entries = alloc::vec![0u32; positions.len()];
        for (i, &c) in cells.iter().enumerate() {
            entries[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        SpatialIndex {
            cell_size,
            layout: Layout::Dense { nx, ny, cell_w, cell_h, starts },
            entries,
        }
    }

    fn build_sparse(positions: &[Vec2], cell_size: f64) -> Self {
        let mut tagged: Vec<((i64, i64), u32)> = positions
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let key = (math::floor(p.y / cell_size) as i64, math::floor(p.x / cell_size) as i64);
                (key, i as u32)
            })
            .collect();
        tagged.sort_unstable();
        let keys = tagged.iter().map(|&(k, _)| k).collect();
        let entries = tagged.iter().map(|&(_, i)| i).collect();
        SpatialIndex { cell_size, layout: Layout::Sparse { keys }, entries }
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Calls `f` for every indexed agent whose cell can hold points within
    /// `radius` of `center`. Each agent is visited at most once; no distance
    /// filtering is done here.
    fn for_each_candidate(&self, center: Vec2, radius: f64, mut f: impl FnMut(usize)) {
        match &self.layout {
            Layout::Dense { nx, ny, cell_w, cell_h, starts } => {
                let (nx, ny) = (*nx, *ny);
                let span = |c: f64, cell: f64, n: usize| -> (i64, i64, bool) {
                    let s = slack(c, radius);
                    let lo = math::floor((c - radius - s) / cell) as i64;
                    let hi = math::floor((c + radius + s) / cell) as i64;
                    (lo, hi, (hi - lo + 1) as usize >= n)
                };
                let (x_lo, x_hi, x_all) = span(center.x, *cell_w, nx);
                let (y_lo, y_hi, y_all) = span(center.y, *cell_h, ny);
                let (x_lo, x_hi) = if x_all { (0, nx as i64 - 1) } else { (x_lo, x_hi) };
                let (y_lo, y_hi) = if y_all { (0, ny as i64 - 1) } else { (y_lo, y_hi) };
                for gy in y_lo..=y_hi {
                    let cy = gy.rem_euclid(ny as i64) as usize;
                    for gx in x_lo..=x_hi {
                        let cx = gx.rem_euclid(nx as i64) as usize;
                        let c = cy * nx + cx;
                        for &e in &self.entries[starts[c] as usize..starts[c + 1] as usize] {
                            f(e as usize);
                        }
                    }
                }
            }
            Layout::Flat => self.entries.iter().for_each(|&e| f(e as usize)),
            Layout::Sparse { keys } => {
                let cs = self.cell_size;
                let sx = slack(center.x, radius);
                let sy = slack(center.y, radius);
                let x_lo = math::floor((center.x - radius - sx) / cs) as i64;
                let x_hi = math::floor((center.x + radius + sx) / cs) as i64;
                let y_lo = math::floor((center.y - radius - sy) / cs) as i64;
                let y_hi = math::floor((center.y + radius + sy) / cs) as i64;
                for row in y_lo..=y_hi {
                    let from = keys.partition_point(|&k| k < (row, x_lo));
                    let to = keys.partition_point(|&k| k <= (row, x_hi));
                    for &e in &self.entries[from..to] {
                        f(e as usize);
                    }
                }
            }
        }
    }

    /// Appends to `out` the indices of agents within `radius` of `center`,
    /// skipping `exclude`, in ascending index order.
    pub fn query_into(
        &self,
        positions: &[Vec2],
        world: &WorldSpec,
        center: Vec2,
        radius: f64,
        exclude: Option<usize>,
        out: &mut Vec<usize>,
    ) {
        let start = out.len();
        self.for_each_candidate(center, radius, |i| {
            if Some(i) != exclude && within(center, positions[i], world, radius) {
                out.push(i);
            }
        });
        out[start..].sort_unstable();
    }

    /// Indices of agents within `radius` of `center` (ascending).
    pub fn radius_query(
        &self,
        positions: &[Vec2],
        world: &WorldSpec,
        center: Vec2,
        radius: f64,
        exclude: Option<usize>,
    ) -> Vec<usize> {
        let mut out = Vec::new();
        self.query_into(positions, world, center, radius, exclude, &mut out);
        out
    }
}

/// O(n) scan with the same predicate as [`SpatialIndex::radius_query`].
pub fn brute_force_query(
    positions: &[Vec2],
    world: &WorldSpec,
    center: Vec2,
    radius: f64,
    exclude: Option<usize>,
) -> Vec<usize> {
    (0..positions.len())
        .filter(|&i| Some(i) != exclude && within(center, positions[i], world, radius))
        .collect()
}
