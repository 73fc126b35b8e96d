use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,

    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("self-loop at vertex {0} is not allowed")]
    SelfLoop(usize),

    #[error("edge ({j}, {k}) has invalid weight {weight}; weights must be finite and non-negative")]
    InvalidWeight { j: usize, k: usize, weight: f64 },

    #[error("edge ({0}, {1}) is listed more than once")]
    DuplicateEdge(usize, usize),

    #[error("invalid {family} parameters: {reason}")]
    InvalidFamily { family: &'static str, reason: String },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cell vectors are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("group index {index} out of range ({groups} eigenvalue groups)")]
    GroupOutOfRange { index: usize, groups: usize },

    #[error("solver residual {residual:e} exceeds {limit:e}")]
    ResidualExceeded { residual: f64, limit: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
