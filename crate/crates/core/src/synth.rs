//! Ground-truth generators: random edge sets, transformed and corrupted
//! copies of them, and anti-aliased renderings of simple shapes.
//!
//! All randomness comes from `ChaCha8Rng` seeded with `seed_from_u64`, which
//! is portable and stable across platforms.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::edge::{normalize_angle, Edge, EdgeSet};
use crate::hypothesis::Transform;
use crate::image::GrayImage;
use crate::{Error, Result};

/// Side length of the supersampling grid used per pixel in [`render_shapes`].
pub const SUPERSAMPLE: usize = 4;

/// How the "new image" deviates from the reference beyond the transform.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorruptionSpec {
    /// Probability that a reference edge is missing from the new set.
    pub dropout: f64,
    /// Standard deviation of the isotropic Gaussian position noise, pixels.
    pub jitter_pos: f64,
    /// Standard deviation of the orientation noise, radians.
    pub jitter_theta: f64,
    /// Spurious edges added, as a fraction of the surviving edges.
    pub clutter_frac: f64,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn clean(seed: u64) -> Self {
        Self { dropout: 0.0, jitter_pos: 0.0, jitter_theta: 0.0, clutter_frac: 0.0, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.dropout) {
            return Err(Error::InvalidConfig("dropout must lie in [0, 1]"));
        }
        if !(self.jitter_pos >= 0.0 && self.jitter_theta >= 0.0 && self.clutter_frac >= 0.0) {
            return Err(Error::InvalidConfig("noise scales and clutter must be non-negative"));
        }
        if !(self.jitter_pos.is_finite() && self.jitter_theta.is_finite() && self.clutter_frac.is_finite()) {
            return Err(Error::InvalidConfig("noise scales and clutter must be finite"));
        }
        Ok(())
    }
}

fn uniform_edge(rng: &mut ChaCha8Rng, width: usize, height: usize) -> Edge {
    Edge {
        x: rng.random_range(0.0..width as f64),
        y: rng.random_range(0.0..height as f64),
        theta: rng.random_range(0.0..TAU),
        kappa: 0.0,
        confidence: rng.random_range(0.5..=1.0),
        reliable: true,
    }
}

/// `n` edges uniform over the frame, uniform orientation, confidence in
/// `[0.5, 1]`, all reliable with zero curvature.
pub fn random_edge_set(n: usize, width: usize, height: usize, seed: u64) -> EdgeSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = (0..n).map(|_| uniform_edge(&mut rng, width, height)).collect();
    EdgeSet::new(width, height, edges).expect("uniform edges satisfy the set invariants")
}

/// Builds a "new image" edge set from a reference: each surviving edge is
/// placed at `(p - t) / s` plus jitter, so matching the result against the
/// reference should recover `transform` itself.
pub fn corrupt_and_transform(
    reference: &EdgeSet,
    transform: &Transform,
    spec: &CorruptionSpec,
    out_width: usize,
    out_height: usize,
) -> Result<EdgeSet> {
    spec.validate()?;
    transform.validate()?;
    if out_width == 0 || out_height == 0 {
        return Err(Error::InvalidImage("zero frame dimension"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pos_noise = Normal::new(0.0, spec.jitter_pos).map_err(|_| Error::InvalidConfig("jitter_pos"))?;
    let theta_noise = Normal::new(0.0, spec.jitter_theta).map_err(|_| Error::InvalidConfig("jitter_theta"))?;

    let mut edges = Vec::with_capacity(reference.len());
    for e in reference.edges() {
        if rng.random_bool(spec.dropout) {
            continue;
        }
        let (nx, ny) = transform.inverse_apply(e.x, e.y);
        let (jx, jy, jt) = (pos_noise.sample(&mut rng), pos_noise.sample(&mut rng), theta_noise.sample(&mut rng));
        let moved = Edge { x: nx + jx, y: ny + jy, theta: normalize_angle(e.theta + jt), ..*e };
        if moved.x >= 0.0 && moved.y >= 0.0 && moved.x < out_width as f64 && moved.y < out_height as f64 {
            edges.push(moved);
        }
    }
    let clutter = (spec.clutter_frac * edges.len() as f64).round() as usize;
    for _ in 0..clutter {
        edges.push(uniform_edge(&mut rng, out_width, out_height));
    }
    EdgeSet::new(out_width, out_height, edges)
}

/// Geometry of a rendered shape, in pixel-center coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum ShapeKind {
    Disk { cx: f64, cy: f64, r: f64 },
    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`.
    Rect { x0: f64, y0: f64, x1: f64, y1: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Shape {
    pub kind: ShapeKind,
    pub intensity: f64,
}

impl ShapeKind {
    fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            ShapeKind::Disk { cx, cy, r } => (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r,
            ShapeKind::Rect { x0, y0, x1, y1 } => x >= x0 && x <= x1 && y >= y0 && y <= y1,
        }
    }

    fn bounds(&self) -> (f64, f64, f64, f64) {
        match *self {
            ShapeKind::Disk { cx, cy, r } => (cx - r, cy - r, cx + r, cy + r),
            ShapeKind::Rect { x0, y0, x1, y1 } => (x0, y0, x1, y1),
        }
    }

    fn is_well_formed(&self) -> bool {
        match *self {
            ShapeKind::Disk { r, .. } => r > 0.0,
            ShapeKind::Rect { x0, y0, x1, y1 } => x1 > x0 && y1 > y0,
        }
    }
}

/// Rasterizes shapes over a uniform background with 4x4 supersampling.
/// Later shapes paint over earlier ones. The frame covers
/// `[-0.5, width - 0.5] x [-0.5, height - 0.5]`.
pub fn render_shapes(width: usize, height: usize, background: f64, shapes: &[Shape]) -> Result<GrayImage> {
    if !(0.0..=1.0).contains(&background) {
        return Err(Error::InvalidImage("background intensity outside [0, 1]"));
    }
    for (index, s) in shapes.iter().enumerate() {
        let (x0, y0, x1, y1) = s.kind.bounds();
        let inside = x0 >= -0.5 && y0 >= -0.5 && x1 <= width as f64 - 0.5 && y1 <= height as f64 - 0.5;
        if !inside || !s.kind.is_well_formed() || !(0.0..=1.0).contains(&s.intensity) {
            return Err(Error::ShapeOutOfFrame { index, width, height });
        }
    }
    let step = 1.0 / SUPERSAMPLE as f64;
    let norm = 1.0 / (SUPERSAMPLE * SUPERSAMPLE) as f64;
    GrayImage::from_fn(width, height, |x, y| {
        let mut acc = 0.0;
        for sy in 0..SUPERSAMPLE {
            for sx in 0..SUPERSAMPLE {
                let px = x as f64 - 0.5 + (sx as f64 + 0.5) * step;
                let py = y as f64 - 0.5 + (sy as f64 + 0.5) * step;
                acc += shapes
                    .iter()
                    .rev()
                    .find(|s| s.kind.contains(px, py))
                    .map_or(background, |s| s.intensity);
            }
        }
        (acc * norm).clamp(0.0, 1.0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_sets_are_deterministic_and_valid() {
        assert!(random_edge_set(0, 10, 10, 1).is_empty());
        let a = random_edge_set(100, 64, 64, 9);
        assert_eq!(a, random_edge_set(100, 64, 64, 9));
        assert_ne!(a, random_edge_set(100, 64, 64, 10));
        assert_eq!(a.len(), 100);
        for e in a.edges() {
            assert!((0.5..=1.0).contains(&e.confidence) && e.reliable && e.kappa == 0.0);
        }
    }

    #[test]
    fn identity_without_noise_reproduces_the_set() {
        let a = random_edge_set(80, 64, 48, 2);
        let n = corrupt_and_transform(&a, &Transform::identity(), &CorruptionSpec::clean(5), 64, 48).unwrap();
        assert_eq!(n, a);
    }

    #[test]
    fn full_dropout_is_empty() {
        let a = random_edge_set(80, 64, 48, 2);
        let spec = CorruptionSpec { dropout: 1.0, ..CorruptionSpec::clean(1) };
        assert!(corrupt_and_transform(&a, &Transform::identity(), &spec, 64, 48).unwrap().is_empty());
    }

    #[test]
    fn inverse_mapping_arithmetic() {
        let e = Edge { x: 30.0, y: 40.0, theta: 1.0, kappa: 0.0, confidence: 0.9, reliable: true };
        let a = EdgeSet::new(64, 64, alloc::vec![e]).unwrap();
        let t = Transform { s: 0.5, tx: 10.0, ty: 5.0 };
        let n = corrupt_and_transform(&a, &t, &CorruptionSpec::clean(0), 128, 128).unwrap();
        assert_eq!(n.edges()[0].position(), (40.0, 70.0));
        assert_eq!(n.edges()[0].theta, 1.0);
        // clipped when the frame is too small
        assert!(corrupt_and_transform(&a, &t, &CorruptionSpec::clean(0), 64, 64).unwrap().is_empty());
    }

    #[test]
    fn clutter_and_dropout_counts() {
        let a = random_edge_set(400, 100, 100, 4);
        let spec = CorruptionSpec { dropout: 0.25, jitter_pos: 0.0, jitter_theta: 0.0, clutter_frac: 0.5, seed: 3 };
        let n = corrupt_and_transform(&a, &Transform::identity(), &spec, 100, 100).unwrap();
        let survivors = n.edges().iter().filter(|e| a.edges().contains(e)).count();
        assert!((250..350).contains(&survivors), "{survivors}");
        assert_eq!(n.len() - survivors, (survivors as f64 * 0.5).round() as usize);
        assert_eq!(n, corrupt_and_transform(&a, &Transform::identity(), &spec, 100, 100).unwrap());
    }

    #[test]
    fn render_disk() {
        let img = render_shapes(
            128,
            128,
            0.0,
            &[Shape { kind: ShapeKind::Disk { cx: 64.0, cy: 64.0, r: 30.0 }, intensity: 1.0 }],
        )
        .unwrap();
        assert_eq!(img.get(64, 64), 1.0);
        assert_eq!(img.get(0, 0), 0.0);
        assert_eq!(img.get(127, 127), 0.0);
        let boundary = img.get(94, 64);
        assert!(boundary > 0.0 && boundary < 1.0);
        // area is preserved up to sampling error
        let area: f64 = img.pixels().iter().sum();
        assert!((area - core::f64::consts::PI * 900.0).abs() < 10.0);
    }

    #[test]
    fn render_background_and_overpaint() {
        let img = render_shapes(8, 8, 0.5, &[]).unwrap();
        assert!(img.pixels().iter().all(|&v| v == 0.5));
        let shapes = [
            Shape { kind: ShapeKind::Rect { x0: -0.5, y0: -0.5, x1: 7.5, y1: 7.5 }, intensity: 0.2 },
            Shape { kind: ShapeKind::Rect { x0: 1.5, y0: 1.5, x1: 3.5, y1: 3.5 }, intensity: 0.9 },
        ];
        let img = render_shapes(8, 8, 0.5, &shapes).unwrap();
        assert!((img.get(0, 0) - 0.2).abs() < 1e-12);
        assert!((img.get(2, 2) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn render_rejects_out_of_frame() {
        let s = Shape { kind: ShapeKind::Disk { cx: 5.0, cy: 5.0, r: 6.0 }, intensity: 1.0 };
        assert!(matches!(render_shapes(16, 16, 0.0, &[s]), Err(Error::ShapeOutOfFrame { index: 0, .. })));
    }
}
