use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: duplicate edge ({u}, {v}) in layer {layer}")]
    DuplicateEdge {
        line: usize,
        layer: usize,
        u: String,
        v: String,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("aggregated graph is not connected ({components} components)")]
    NotConnected { components: usize },

    #[error("cluster {cluster} has {size} nodes, at least {required} required")]
    ClusterTooSmall {
        cluster: usize,
        size: usize,
        required: usize,
    },

    #[error("eigensolver did not converge after {iterations} restarts (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
