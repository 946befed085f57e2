use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("too many qubits: {n} (limit {limit})")]
    TooManyQubits { n: usize, limit: usize },

    #[error("problem too large: {0}")]
    Infeasible(String),

    #[error("empty or zero generator set")]
    EmptyGenerators,

    #[error("closure truncated at dimension {0}; result would be a lower bound")]
    Truncated(usize),

    #[error("observable is not in the algebra (relative residual {residual:.3e})")]
    NonLasa { residual: f64 },

    #[error("operator is not in the algebra (relative residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("ideal decomposition failed validation: {0}")]
    Decomposition(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("overflow while computing {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;
