use thiserror::Error;

/// Errors raised by graph construction, Hamiltonian assembly, propagation and
/// optimization.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WalkError {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("graph is disconnected")]
    Disconnected,

    #[error("vertex {vertex} out of range 1..={n}")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigensolver did not converge within {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("negative time {0} is not allowed for the classical semigroup")]
    NegativeTime(f64),

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("requires a complete graph topology")]
    NotComplete,

    #[error("states have different average energies ({0} vs {1})")]
    EnergyMismatch(f64, f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, WalkError>;
