use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("total {total} is smaller than the minimum part size {min}")]
    TooSmall { total: usize, min: usize },

    #[error("cannot distribute remainder {remainder}: every part is at the maximum {max}")]
    Saturated { remainder: usize, max: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("node {to} is unreachable from node {from}")]
    Unreachable { from: usize, to: usize },

    #[error("graph is disconnected, so the consensus chain is reducible")]
    Reducible,

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("unknown modality `{0}`")]
    UnknownModality(String),

    #[error("unknown metric `{0}`")]
    UnknownMetric(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power iteration did not converge within {0} iterations")]
    IterationLimit(usize),

    #[error("second eigenvalue modulus {0} is not contracting")]
    NonContracting(f64),

    #[error("matrix is numerically singular")]
    Singular,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("design matrix is rank deficient: {0}")]
    Collinear(String),

    #[error("underdetermined system: {rows} rows for {cols} columns")]
    Underdetermined { rows: usize, cols: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
