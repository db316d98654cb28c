use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("threshold is undefined for p = 0")]
    ZeroProbability,

    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: u64, n: u32 },

    #[error("initial set size {a} exceeds vertex count {n}")]
    InitialSetTooLarge { a: u64, n: u32 },

    #[error("expected edge count {expected:.3e} exceeds memory budget of {budget:.3e} edges")]
    MemoryBudget { expected: f64, budget: f64 },

    #[error("k-sets over {n} vertices with k = {k} do not fit a 128-bit key")]
    KeySpaceTooLarge { n: u32, k: u32 },

    #[error("invalid hypergraph: {0}")]
    InvalidHypergraph(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("branching process is not subcritical (mean offspring {mu})")]
    NotSubcritical { mu: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
