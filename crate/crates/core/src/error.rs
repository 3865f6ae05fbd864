use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while building or running walks, sweeps and fits.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidGeometry(String),

    #[error("coordinate {value} on axis {axis} is outside [0, {side})")]
    CoordinateOutOfRange { axis: usize, value: usize, side: usize },

    #[error("expected {expected} coordinates, got {got}")]
    CoordinateArity { expected: usize, got: usize },

    #[error("invalid coin: {0}")]
    InvalidCoin(String),

    #[error("invalid oracle: {0}")]
    InvalidOracle(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense operator of dimension {dim} exceeds the limit of {limit}")]
    DenseLimit { dim: usize, limit: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot fit: {0}")]
    Fit(String),

    #[error("target placement: {0}")]
    Placement(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
