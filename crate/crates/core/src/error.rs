use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no data rows")]
    EmptyInput,

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    /// Row index is zero-based.
    #[error("row {row} is the zero vector and has no direction")]
    DegenerateVector { row: usize },

    #[error("row {row} has norm {norm}, too far from 1 to renormalize")]
    NotUnit { row: usize, norm: f64 },

    /// Point indices are zero-based; the message reports them one-based.
    #[error("points {} and {} coincide", .first + 1, .second + 1)]
    CoincidentPoints { first: usize, second: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("matrix is not symmetric (max asymmetry {max_asymmetry:e})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("embedding dimension k={k} must satisfy 1 <= k <= {d}")]
    DimensionRange { k: usize, d: usize },

    #[error("basis columns are not orthonormal (max |V^T V - I| = {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("weights are not on the probability simplex: {0}")]
    NotOnSimplex(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("result and bound report were computed on different data ({result} vs {report})")]
    Provenance { result: String, report: String },

    #[error("weak duality violated: dual value {dual} exceeds primal distortion {epsilon}")]
    SandwichViolation { dual: f64, epsilon: f64 },

    #[error("certified ratio {ratio} exceeds the spectral bound {bound}")]
    BoundViolation { ratio: f64, bound: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
