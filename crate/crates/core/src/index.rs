//! Uniform-grid spatial index over an [`EdgeSet`].

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;

use crate::edge::{angular_distance, EdgeSet};

/// Buckets edge indices by the grid cell containing their position.
///
/// Stored in compressed form: `starts[c]..starts[c + 1]` is the slice of
/// `entries` holding the (ascending) edge indices of cell `c`.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    cell_size: f64,
    cols: usize,
    rows: usize,
    starts: Vec<u32>,
    entries: Vec<u32>,
    len: usize,
}

impl SpatialIndex {
    /// Panics if `cell_size` is not a positive finite number.
    pub fn build(set: &EdgeSet, cell_size: f64) -> Self {
        assert!(cell_size.is_finite() && cell_size > 0.0, "cell_size must be positive");
        let cols = ((set.width() as f64 / cell_size).ceil() as usize).max(1);
        let rows = ((set.height() as f64 / cell_size).ceil() as usize).max(1);
        let cell_of = |x: f64, y: f64| {
            let cx = ((x / cell_size) as usize).min(cols - 1);
            let cy = ((y / cell_size) as usize).min(rows - 1);
            cy * cols + cx
        };

        let mut counts = vec![0u32; cols * rows + 1];
        for e in set.edges() {
            counts[cell_of(e.x, e.y) + 1] += 1;
        }
        for c in 1..counts.len() {
            counts[c] += counts[c - 1];
        }
        let starts = counts.clone();
        let mut fill = counts;
        let mut entries = vec![0u32; set.len()];
        for (i, e) in set.edges().iter().enumerate() {
            let c = cell_of(e.x, e.y);
            entries[fill[c] as usize] = i as u32;
            fill[c] += 1;
        }
        Self { cell_size, cols, rows, starts, entries, len: set.len() }
    }

    #[inline]
    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    /// Calls `f` with every edge index whose cell overlaps the square of
    /// half-side `radius` around `(x, y)`. Candidates still need the exact
    /// distance test.
    pub fn for_each_candidate(&self, x: f64, y: f64, radius: f64, mut f: impl FnMut(usize)) {
        if !(radius >= 0.0) || !x.is_finite() || !y.is_finite() {
            return;
        }
        let lo_x = ((x - radius) / self.cell_size).floor();
        let hi_x = ((x + radius) / self.cell_size).floor();
        let lo_y = ((y - radius) / self.cell_size).floor();
        let hi_y = ((y + radius) / self.cell_size).floor();
        if hi_x < 0.0 || hi_y < 0.0 || lo_x >= self.cols as f64 || lo_y >= self.rows as f64 {
            return;
        }
        let cx0 = lo_x.max(0.0) as usize;
        let cy0 = lo_y.max(0.0) as usize;
        let cx1 = (hi_x as usize).min(self.cols - 1);
        let cy1 = (hi_y as usize).min(self.rows - 1);
        for cy in cy0..=cy1 {
            for cx in cx0..=cx1 {
                let c = cy * self.cols + cx;
                for &i in &self.entries[self.starts[c] as usize..self.starts[c + 1] as usize] {
                    f(i as usize);
                }
            }
        }
    }

    /// Indices `i` with `|p_i - (x, y)| <= radius` and
    /// `angular_distance(theta_i, theta) <= eps_theta`, ascending.
    pub fn query_near(
        &self,
        set: &EdgeSet,
        x: f64,
        y: f64,
        radius: f64,
        theta: f64,
        eps_theta: f64,
    ) -> Vec<usize> {
        debug_assert_eq!(set.len(), self.len, "index built for a different set");
        let edges = set.edges();
        let mut out = Vec::new();
        self.for_each_candidate(x, y, radius, |i| {
            let e = &edges[i];
            if (e.x - x).hypot(e.y - y) <= radius && angular_distance(e.theta, theta) <= eps_theta {
                out.push(i);
            }
        });
        out.sort_unstable();
        out
    }
}
