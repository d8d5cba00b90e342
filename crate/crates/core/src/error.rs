//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension must be 1 or 2, got {0}")]
    InvalidDimension(usize),

    #[error("grid point count must be a power of two >= 4, got {0}")]
    InvalidPointCount(usize),

    #[error("grid extent must be positive and finite, got {0}")]
    InvalidExtent(f64),

    #[error("value length {got} does not match grid size {expected}")]
    ValueLength { expected: usize, got: usize },

    #[error("non-finite value at flat index {0}")]
    NonFiniteValue(usize),

    #[error("exponent must be >= 1 (or +inf where allowed), got {0}")]
    InvalidExponent(f64),

    #[error("threshold must be a finite value >= 0, got {0}")]
    InvalidThreshold(f64),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("wrap-around tail fraction {fraction:.3e} exceeds tolerance {tolerance:.3e}")]
    TailMass { fraction: f64, tolerance: f64 },

    #[error("denominator norm is zero")]
    ZeroNorm,

    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("sphere dimension must be 0, 1 or 2, got {0}")]
    InvalidSphereDimension(usize),

    #[error("quadrature resolution {0} is invalid: {1}")]
    InvalidResolution(usize, &'static str),

    #[error("point {0:?} lies outside the grid span")]
    PointOutsideGrid(Vec<f64>),

    #[error("grid too small for the unit sphere: {0}")]
    GridTooSmall(String),

    #[error("non-finite result in {0}")]
    NonFiniteResult(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("multiplier spec: {0}")]
    SpecFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
