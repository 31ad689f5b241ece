use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid graph: {0}")]
    Graph(String),
    #[error("invalid assignment: {0}")]
    Assignment(String),
    #[error("stabilizers do not commute: X row {x} and Z row {z} overlap oddly")]
    Commutation { x: usize, z: usize },
    #[error("search budget exceeded: {needed} candidate supports needed, budget is {budget}")]
    Budget { needed: u128, budget: u128 },
    #[error("graph is not bipartite: {0}")]
    NotBipartite(String),
    #[error("contraction: {0}")]
    Contraction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
