//! Crate-wide error type.

/// Errors produced by geometry, triangulation, solvers, and data loading.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the open unit disk (norm {norm})")]
    OutsideDisk { x: f64, y: f64, norm: f64 },

    #[error("non-finite coordinate in ({x}, {y})")]
    NonFinite { x: f64, y: f64 },

    #[error("standard deviation must be positive, got {0}")]
    InvalidSigma(f64),

    #[error("angle undefined: an endpoint coincides with the vertex")]
    DegenerateAngle,

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("duplicate points at indices {i} and {j}")]
    DuplicatePoints { i: usize, j: usize },

    #[error("edge ({u}, {v}) collapsed below length {len:e}")]
    CollapsedEdge { u: usize, v: usize, len: f64 },

    #[error("wrapped Gaussian sample left the disk after {0} retries")]
    SampleOutOfDisk(usize),

    #[error("invalid dataset spec: {0}")]
    InvalidSpec(String),

    #[error("failed to read point file: {0}")]
    PointFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
