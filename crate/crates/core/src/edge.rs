//! Edge representation and circular-angle arithmetic.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use crate::{Error, Result};

/// Reduces an angle to the half-open range `[0, 2π)`.
#[inline]
pub fn normalize_angle(a: f64) -> f64 {
    let mut r = a % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // tiny negative inputs round up to exactly TAU
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Shortest distance between two directions on the circle, in `[0, π]`.
#[inline]
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = normalize_angle(a - b);
    if d > PI {
        TAU - d
    } else {
        d
    }
}

/// Separation between two orientations taken modulo π, in `[0, π/2]`.
#[inline]
pub(crate) fn line_separation(a: f64, b: f64) -> f64 {
    let d = angular_distance(a, b);
    d.min(PI - d)
}

/// One oriented edge element.
///
/// `theta` is the tangent direction on the full circle: the brighter side of
/// the edge always lies to the same side of the tangent, so contrast polarity
/// is kept.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Edge {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub kappa: f64,
    pub confidence: f64,
    pub reliable: bool,
}

impl Edge {
    #[inline]
    pub fn position(&self) -> (f64, f64) {
        (self.x, self.y)
    }

    #[inline]
    pub fn distance_to(&self, other: &Edge) -> f64 {
        num_traits::Float::hypot(self.x - other.x, self.y - other.y)
    }
}

/// Edges of one image together with the frame they live in.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EdgeSet {
    width: usize,
    height: usize,
    edges: Vec<Edge>,
}

impl EdgeSet {
    /// Validates every edge against the frame and value ranges.
    pub fn new(width: usize, height: usize, edges: Vec<Edge>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage("zero frame dimension"));
        }
        for (index, e) in edges.iter().enumerate() {
            check_edge(index, e, width, height)?;
        }
        Ok(Self { width, height, edges })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        Self::new(width, height, Vec::new())
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    #[inline]
    pub fn diagonal(&self) -> f64 {
        num_traits::Float::hypot(self.width as f64, self.height as f64)
    }

    /// Whether a point lies in `[0, width) x [0, height)`.
    #[inline]
    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }
}

fn check_edge(index: usize, e: &Edge, width: usize, height: usize) -> Result<()> {
    let bad = |reason| Err(Error::InvalidEdge { index, reason });
    if !(e.x >= 0.0 && e.x < width as f64 && e.y >= 0.0 && e.y < height as f64) {
        return bad("position outside the frame");
    }
    if !(e.theta >= 0.0 && e.theta < TAU) {
        return bad("orientation outside [0, 2π)");
    }
    if !e.kappa.is_finite() {
        return bad("curvature is not finite");
    }
    if !(0.0..=1.0).contains(&e.confidence) {
        return bad("confidence outside [0, 1]");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn angular_distance_examples() {
        assert_eq!(angular_distance(0.0, 0.0), 0.0);
        assert!((angular_distance(0.1, TAU - 0.1) - 0.2).abs() < 1e-12);
        assert!((angular_distance(0.0, PI) - PI).abs() < 1e-15);
        assert!((angular_distance(-7.0, 4.0 * PI - 7.0) - 0.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_tiny_negative() {
        let a = normalize_angle(-1e-18);
        assert!((0.0..TAU).contains(&a));
    }

    #[test]
    fn edge_set_validation() {
        let good = Edge { x: 1.0, y: 2.0, theta: 0.5, kappa: 0.0, confidence: 0.5, reliable: true };
        assert!(EdgeSet::new(4, 4, alloc::vec![good]).is_ok());
        let cases = [
            Edge { x: 4.0, ..good },
            Edge { y: -0.1, ..good },
            Edge { theta: TAU, ..good },
            Edge { confidence: 1.1, ..good },
            Edge { kappa: f64::INFINITY, ..good },
        ];
        for e in cases {
            assert!(matches!(EdgeSet::new(4, 4, alloc::vec![e]), Err(Error::InvalidEdge { index: 0, .. })));
        }
    }

    proptest! {
        #[test]
        fn angular_distance_is_a_metric(a in -20.0f64..20.0, b in -20.0f64..20.0, c in -20.0f64..20.0) {
            let ab = angular_distance(a, b);
            prop_assert!((0.0..=PI).contains(&ab));
            prop_assert!((ab - angular_distance(b, a)).abs() < 1e-12);
            prop_assert!(ab <= angular_distance(a, c) + angular_distance(c, b) + 1e-12);
        }

        #[test]
        fn line_separation_in_range(a in 0.0f64..TAU, b in 0.0f64..TAU) {
            let s = line_separation(a, b);
            prop_assert!((0.0..=PI / 2.0 + 1e-15).contains(&s));
            prop_assert!((s - line_separation(a + PI, b)).abs() < 1e-9);
        }
    }
}
