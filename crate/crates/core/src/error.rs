use thiserror::Error;

/// Errors produced by the geometry, array, channel and beam-synthesis layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("quaternion has zero or non-finite norm")]
    ZeroQuaternion,

    /// Shortest-arc interpolation between rotations exactly π apart has no unique path.
    #[error("rotation endpoints are antipodal (relative angle π); shortest arc is ambiguous")]
    DegenerateSlerp,

    #[error("uv point ({u}, {v}) lies outside the unit disk")]
    OutsideVisibleRegion { u: f64, v: f64 },

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid transitional donors: {0}")]
    InvalidDonors(String),

    #[error("unsupported partition for this layout: {0}")]
    UnsupportedPartition(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("weight vector has no active element")]
    NoActiveElements,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trace line {line}: {message}")]
    Trace { line: u64, message: String },

    #[error("coverage infeasible: sub-beam spacing {spacing:.5} uv exceeds beamwidth {beamwidth:.5} uv")]
    CoverageInfeasible { spacing: f64, beamwidth: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
