use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An expectation value came back with a non-negligible imaginary part,
    /// which only happens if the operator is not Hermitian.
    #[error("expectation has imaginary residue {imag:e}; operator is not Hermitian")]
    NonHermitian { imag: f64 },

    #[error(
        "point ({p1}, {p2}) is off the constraint curve (residual {residual:e} > tol {tol:e})"
    )]
    NotOnCurve {
        p1: f64,
        p2: f64,
        residual: f64,
        tol: f64,
    },

    #[error("invalid probability quadruple: {0}")]
    InvalidProbabilities(String),

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
