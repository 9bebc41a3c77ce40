use std::io;

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("region index {index} out of range for {n} regions")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("duplicate region identifier `{0}`")]
    DuplicateRegion(String),

    #[error("self-loop on region {0}")]
    SelfLoop(usize),

    #[error("adjacency is not symmetric: {i} lists {j} but {j} does not list {i}")]
    Asymmetric { i: usize, j: usize },

    #[error("grid dimensions must be positive, got {nrow}x{ncol}")]
    EmptyGrid { nrow: usize, ncol: usize },

    #[error("matrix is not positive definite (pivot at index {index})")]
    NotPositiveDefinite { index: usize },

    #[error("matrix entry ({row}, {col}) lies outside the analyzed sparsity pattern")]
    PatternMismatch { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid count data: {0}")]
    InvalidData(String),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),

    #[error("invalid scale set: {0}")]
    InvalidScales(String),

    #[error("level {level} out of range for {levels} levels")]
    LevelOutOfRange { level: usize, levels: usize },

    #[error("empty sample collection")]
    EmptyCollection,

    #[error("alpha must lie in (0, 0.5), got {0}")]
    InvalidAlpha(f64),

    #[error("series too short: need at least {min} values, got {len}")]
    SeriesTooShort { min: usize, len: usize },

    #[error("invalid trace file: {0}")]
    Trace(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
