//! Basis couples and shift + scale hypotheses.
//!
//! A basis couple is two reliable, well separated, non-parallel edges of the
//! reference set A. For each couple, the new set N is searched for two edges
//! with the same orientations whose joining axis has the same slope; the
//! ratio of the two separations gives the scale, and mapping the first edge
//! onto its partner gives the shift.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

#[allow(unused_imports)] // f64 has inherent methods once std is linked
use num_traits::Float;

use crate::edge::{angular_distance, line_separation, normalize_angle, Edge, EdgeSet};
use crate::{Error, Result};

/// Shift + isotropic scale mapping an N-frame point `p` to `s p + t` in the A frame.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Transform {
    pub s: f64,
    pub tx: f64,
    pub ty: f64,
}

impl Transform {
    pub const fn identity() -> Self {
        Self { s: 1.0, tx: 0.0, ty: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s > 0.0 && self.s.is_finite() && self.tx.is_finite() && self.ty.is_finite()) {
            return Err(Error::Domain("transform needs a positive finite scale and finite shift"));
        }
        Ok(())
    }

    #[inline]
    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.s * x + self.tx, self.s * y + self.ty)
    }

    /// A-frame point back to the N frame: `(p - t) / s`.
    #[inline]
    pub fn inverse_apply(&self, x: f64, y: f64) -> (f64, f64) {
        ((x - self.tx) / self.s, (y - self.ty) / self.s)
    }

    pub fn inverse(&self) -> Self {
        Self { s: 1.0 / self.s, tx: -self.tx / self.s, ty: -self.ty / self.s }
    }

    /// Least-squares shift + scale taking `from[k]` onto `to[k]`.
    ///
    /// Returns `None` with fewer than two points or when `from` has no spread.
    pub fn fit(from: &[(f64, f64)], to: &[(f64, f64)]) -> Option<Self> {
        let n = from.len();
        if n < 2 || to.len() != n {
            return None;
        }
        let inv = 1.0 / n as f64;
        let (mut fx, mut fy, mut gx, mut gy) = (0.0, 0.0, 0.0, 0.0);
        for (f, g) in from.iter().zip(to) {
            fx += f.0;
            fy += f.1;
            gx += g.0;
            gy += g.1;
        }
        let (fx, fy, gx, gy) = (fx * inv, fy * inv, gx * inv, gy * inv);
        let (mut cross, mut spread) = (0.0, 0.0);
        for (f, g) in from.iter().zip(to) {
            let (dx, dy) = (f.0 - fx, f.1 - fy);
            cross += dx * (g.0 - gx) + dy * (g.1 - gy);
            spread += dx * dx + dy * dy;
        }
        if !(spread > 0.0) {
            return None;
        }
        let s = cross / spread;
        if !(s > 0.0 && s.is_finite()) {
            return None;
        }
        Some(Self { s, tx: gx - s * fx, ty: gy - s * fy })
    }
}

impl Default for Transform {
    fn default() -> Self {
        Self::identity()
    }
}

/// A length either in pixels or as a fraction of the frame diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Length {
    Pixels(f64),
    DiagonalFraction(f64),
}

impl Length {
    pub fn resolve(&self, diagonal: f64) -> f64 {
        match *self {
            Length::Pixels(p) => p,
            Length::DiagonalFraction(f) => f * diagonal,
        }
    }
}

/// Tolerances and budgets for basis selection and compatible-pair search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HypothesisConfig {
    /// Orientation tolerance between corresponding edges, radians.
    pub eps_theta: f64,
    /// Tolerance on the slope of the joining axis, radians.
    pub eps_phi: f64,
    /// Minimum orientation separation (mod π) of the two basis edges.
    pub min_sep_angle: f64,
    /// Minimum separation of the two basis edges.
    pub min_dist: Length,
    pub s_min: f64,
    pub s_max: f64,
    /// At most this many basis couples are taken from A.
    pub max_basis_a: usize,
    /// At most this many compatible couples are kept per A couple.
    pub max_pairs_n: usize,
}

impl Default for HypothesisConfig {
    fn default() -> Self {
        Self {
            eps_theta: 0.15,
            eps_phi: 0.15,
            min_sep_angle: 0.35,
            min_dist: Length::DiagonalFraction(0.15),
            s_min: 0.5,
            s_max: 2.0,
            max_basis_a: 300,
            max_pairs_n: 10,
        }
    }
}

impl HypothesisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps_theta > 0.0 && self.eps_phi > 0.0) {
            return Err(Error::InvalidConfig("eps_theta and eps_phi must be positive"));
        }
        if !(self.min_sep_angle > 0.0) {
            return Err(Error::InvalidConfig("min_sep_angle must be positive"));
        }
        if !(self.s_min > 0.0 && self.s_min <= 1.0 && self.s_max >= 1.0 && self.s_max.is_finite()) {
            return Err(Error::InvalidConfig("scale range must satisfy 0 < s_min <= 1 <= s_max"));
        }
        let d = match self.min_dist {
            Length::Pixels(p) | Length::DiagonalFraction(p) => p,
        };
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::InvalidConfig("min_dist must be non-negative"));
        }
        Ok(())
    }
}

/// Two edges of A elected as a candidate basis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BasisPair {
    pub i: usize,
    pub j: usize,
    /// Direction from edge `i` to edge `j`, `[0, 2π)`.
    pub phi: f64,
    pub dist: f64,
    pub quality: f64,
}

impl BasisPair {
    /// Ranking: higher quality first, then lower `i`, then lower `j`.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .quality
            .total_cmp(&self.quality)
            .then(self.i.cmp(&other.i))
            .then(self.j.cmp(&other.j))
    }
}

struct Ranked(BasisPair);

impl PartialEq for Ranked {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Ranked {}
impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Ranked {
    // max-heap top is the worst-ranked pair
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.rank(&other.0)
    }
}

/// Score in `[0, 1]` favouring confident, distant, perpendicular couples:
/// `c1 c2 min(d / (diag / 2), 1) sin(sep)` with `sep` the orientation
/// separation modulo π.
pub fn pair_quality(e1: &Edge, e2: &Edge, frame_diag: f64) -> f64 {
    let dist = e1.distance_to(e2);
    let spread = if frame_diag > 0.0 { (2.0 * dist / frame_diag).min(1.0) } else { 0.0 };
    let sep = line_separation(e1.theta, e2.theta);
    (e1.confidence * e2.confidence * spread * sep.sin()).clamp(0.0, 1.0)
}

fn axis_slope(from: &Edge, to: &Edge) -> f64 {
    normalize_angle((to.y - from.y).atan2(to.x - from.x))
}

/// Whether `(e1, e2)` may serve as a basis under `cfg`, given the resolved
/// minimum distance. Returns the couple's axis slope and length if so.
fn admissible(e1: &Edge, e2: &Edge, min_dist: f64, cfg: &HypothesisConfig) -> Option<(f64, f64)> {
    if !(e1.reliable && e2.reliable) {
        return None;
    }
    let dist = e1.distance_to(e2);
    if !(dist > 0.0 && dist >= min_dist) {
        return None;
    }
    if line_separation(e1.theta, e2.theta) < cfg.min_sep_angle {
        return None;
    }
    let phi = axis_slope(e1, e2);
    // both edges running along the joining axis: collinear, no usable basis
    if line_separation(e1.theta, phi) < cfg.min_sep_angle && line_separation(e2.theta, phi) < cfg.min_sep_angle {
        return None;
    }
    Some((phi, dist))
}

/// Admissible basis couples `(i < j)` of `set`, best first, at most
/// `cfg.max_basis_a` of them.
pub fn enumerate_basis_pairs(set: &EdgeSet, cfg: &HypothesisConfig) -> Vec<BasisPair> {
    let cap = cfg.max_basis_a;
    if cap == 0 {
        return Vec::new();
    }
    let diag = set.diagonal();
    let min_dist = cfg.min_dist.resolve(diag);
    let edges = set.edges();
    let reliable: Vec<usize> = (0..edges.len()).filter(|&i| edges[i].reliable).collect();

    let mut heap: BinaryHeap<Ranked> = BinaryHeap::with_capacity(cap + 1);
    for (a, &i) in reliable.iter().enumerate() {
        for &j in &reliable[a + 1..] {
            let Some((phi, dist)) = admissible(&edges[i], &edges[j], min_dist, cfg) else {
                continue;
            };
            let pair = BasisPair { i, j, phi, dist, quality: pair_quality(&edges[i], &edges[j], diag) };
            if heap.len() == cap {
                let worst = heap.peek().expect("heap is full");
                if pair.rank(&worst.0) != Ordering::Less {
                    continue;
                }
                heap.pop();
            }
            heap.push(Ranked(pair));
        }
    }
    heap.into_sorted_vec().into_iter().map(|r| r.0).collect()
}

/// A couple of N edges matching a basis couple of A, with the transform it implies.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CompatiblePair {
    pub n1: usize,
    pub n2: usize,
    pub transform: Transform,
    /// Distance between the mapped second N edge and the second A edge.
    pub residual: f64,
}

/// Couples of `n` compatible with the A couple `(a1, a2)` described by `basis`.
///
/// Orientations must agree within `eps_theta`, the joining-axis slopes within
/// `eps_phi`, and the implied scale `dist_A / dist_N` must lie in
/// `[s_min, s_max]`. The transform maps the first N edge exactly onto `a1`.
/// Results are sorted by residual on the second edge and capped at
/// `max_pairs_n`.
pub fn find_compatible_pairs(
    n: &EdgeSet,
    basis: &BasisPair,
    a1: &Edge,
    a2: &Edge,
    cfg: &HypothesisConfig,
) -> Vec<CompatiblePair> {
    let edges = n.edges();
    let near = |theta: f64| -> Vec<usize> {
        (0..edges.len())
            .filter(|&k| angular_distance(edges[k].theta, theta) <= cfg.eps_theta)
            .collect()
    };
    let first = near(a1.theta);
    if first.is_empty() {
        return Vec::new();
    }
    let second = near(a2.theta);

    let mut out = Vec::new();
    for &k1 in &first {
        let e1 = &edges[k1];
        for &k2 in &second {
            if k1 == k2 {
                continue;
            }
            let e2 = &edges[k2];
            let dist = e1.distance_to(e2);
            if !(dist > 0.0) {
                continue;
            }
            let s = basis.dist / dist;
            if !(s >= cfg.s_min && s <= cfg.s_max) {
                continue;
            }
            if angular_distance(axis_slope(e1, e2), basis.phi) > cfg.eps_phi {
                continue;
            }
            let transform = Transform { s, tx: a1.x - s * e1.x, ty: a1.y - s * e1.y };
            let (mx, my) = transform.apply(e2.x, e2.y);
            out.push(CompatiblePair { n1: k1, n2: k2, transform, residual: (mx - a2.x).hypot(my - a2.y) });
        }
    }
    out.sort_by(|p, q| {
        p.residual
            .total_cmp(&q.residual)
            .then(p.n1.cmp(&q.n1))
            .then(p.n2.cmp(&q.n2))
    });
    out.truncate(cfg.max_pairs_n);
    out
}
