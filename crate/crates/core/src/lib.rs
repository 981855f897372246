//! Oriented-edge image matching under translation and isotropic scaling.
//!
//! An image is reduced to an unchained set of oriented edges (position,
//! full-circle tangent orientation, isophote curvature, confidence). Two edge
//! sets are compared by hypothesizing a common two-edge basis, deriving the
//! shift + scale that maps one basis onto the other, and verifying the
//! hypothesis by counting coinciding edges.
//!
//! This crate is `no_std` (it needs `alloc`). File formats, the gallery
//! database and the command-line tool live in the `edgebasis` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
mod fft;

pub mod edge;
pub mod hypothesis;
pub mod image;
pub mod index;
pub mod probability;
pub mod spectral;
pub mod synth;
pub mod verify;

pub use edge::{angular_distance, normalize_angle, Edge, EdgeSet};
pub use error::Error;
pub use hypothesis::{
    enumerate_basis_pairs, find_compatible_pairs, pair_quality, BasisPair, CompatiblePair,
    HypothesisConfig, Length, Transform,
};
pub use image::GrayImage;
pub use index::SpatialIndex;
pub use probability::{
    expected_trials, miss_probability, monte_carlo_miss, BasisArity, McEstimate, ProbabilityParams,
};
pub use spectral::{extract_edges, isophote_curvature, spectral_gradient, EdgeExtractionConfig, GradientField};
pub use synth::{corrupt_and_transform, random_edge_set, render_shapes, CorruptionSpec, Shape, ShapeKind};
pub use verify::{
    count_coincidences, match_edge_sets, sequential_verify, BasisMatch, Coincidences, MatchCounts,
    MatchResult, ProbeOutcome, VerifyConfig,
};

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
