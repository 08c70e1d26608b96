//! Error type shared across the crate.

use std::path::PathBuf;
use thiserror::Error;

/// Errors produced by estimation, simulation, and I/O routines.
#[derive(Debug, Error)]
pub enum VardiffError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("insufficient data: need at least {needed} time points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("ingestion error: {0}")]
    Ingestion(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix near singular (reciprocal condition number {rcond:.3e})")]
    NearSingular { rcond: f64 },

    #[error("generation failed after {retries} retries: {reason}")]
    Generation { retries: usize, reason: String },

    #[error("solver diverged: {0}")]
    SolverDiverged(String),

    #[error("invalid gram matrix: diagonal entry {index} is {value:.3e}")]
    InvalidGram { index: usize, value: f64 },

    #[error("column {column} infeasible: smallest feasible eta is about {min_eta:.6e}")]
    Infeasible { column: usize, min_eta: f64 },

    #[error("tuning failed: {0}")]
    Tuning(String),

    #[error("subsample {index} too short: {len} points, need at least {needed}")]
    SubsampleTooShort {
        index: usize,
        len: usize,
        needed: usize,
    },

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serde(String),
}

pub type Result<T> = std::result::Result<T, VardiffError>;
