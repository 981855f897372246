use thiserror::Error;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image is {width}x{height}, at least {min}x{min} required")]
    ImageTooSmall { width: usize, height: usize, min: usize },
    #[error("invalid image: {0}")]
    InvalidImage(&'static str),
    #[error("invalid edge {index}: {reason}")]
    InvalidEdge { index: usize, reason: &'static str },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("argument outside its domain: {0}")]
    Domain(&'static str),
    #[error("shape {index} does not fit inside the {width}x{height} frame")]
    ShapeOutOfFrame { index: usize, width: usize, height: usize },
}
