use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("basis mismatch: {left} vs {right}")]
    BasisMismatch { left: String, right: String },

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("perturbation is not square-zero: {0}")]
    PerturbationInvalid(String),

    #[error("perturbation series does not terminate: {0}")]
    Divergence(String),

    #[error("arity {arity} exceeds truncation {max}")]
    Truncation { arity: usize, max: usize },

    #[error("connectivity requirement violated: {0}")]
    Connectivity(String),

    #[error("unsupported field: {0}")]
    UnsupportedField(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("axiom violated: {0}")]
    AxiomViolation(String),

    #[error("sign consistency failure at {0}")]
    SignConsistency(String),

    #[error("methods disagree: {0}")]
    MethodDivergence(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
