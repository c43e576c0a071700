use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("vertex {vertex} out of range for a tree with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("branch {branch}: {message}")]
    Branch { branch: usize, message: String },

    #[error("tree is bicentroidal (centroid {0:?}) and strict mode is on")]
    NotCentroidal(Vec<usize>),

    #[error("no centroidal tree after {attempts} attempts")]
    RejectionCap { attempts: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
