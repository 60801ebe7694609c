use thiserror::Error;

/// Errors shared across the crate.
///
/// `EmptyResult` is deliberately its own variant: solvers signal "nothing
/// activated" with it, and combined solvers use that to fall back to another
/// branch instead of inventing a piece.
#[derive(Debug, Error)]
pub enum Error {
    /// No node cleared the activation threshold; every candidate labeling
    /// was empty.
    #[error("no activated nodes: every candidate labeling is empty")]
    EmptyResult,

    #[error("node {node} out of range for graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },

    #[error("edge weight must be finite and nonnegative, got {value}")]
    BadEdgeWeight { value: f64 },

    #[error("capacity must be finite and nonnegative, got {value}")]
    BadCapacity { value: f64 },

    #[error("nodes {s} and {t} are not connected")]
    Disconnected { s: usize, t: usize },

    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NonConvergence { residual: f64, iterations: usize },

    #[error("{0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True when the error means "the solver ran fine but nothing activated".
    pub fn is_empty_result(&self) -> bool {
        matches!(self, Error::EmptyResult)
    }

    /// Shorthand for an `InvalidInput` with a formatted message.
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
