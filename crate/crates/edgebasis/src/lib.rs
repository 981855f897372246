//! File formats, gallery storage and reporting around [`edgebasis_core`].

pub mod config;
pub mod edgeset;
pub mod gallery;
pub mod mc;
pub mod overlay;
pub mod pgm;
pub mod report;

pub use edgebasis_core as core;
