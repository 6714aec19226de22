use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("cannot parse scalar literal {0:?}")]
    Parse(String),

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("basis functions {l} and {m} are not orthogonal (residual {residual:e})")]
    NotOrthogonal { l: usize, m: usize, residual: f64 },

    #[error("basis is not orthonormal: norm a_{index} = {norm}")]
    NotOrthonormal { index: usize, norm: f64 },

    #[error("duality unavailable: first-category value of basis function {index} is zero")]
    DualityUnavailable { index: usize },

    #[error("birth rate vanishes at state {state} before the requested degree")]
    VanishingBirthRate { state: usize },

    #[error("death rate vanishes at state {state}")]
    VanishingDeathRate { state: usize },

    #[error("truncation failure: {0}")]
    Truncation(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("interpolation system is singular")]
    Singular,

    #[error("problem too large for brute-force evaluation: {0}")]
    ScaleExceeded(String),

    #[error("invalid specification: {0}")]
    Spec(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(s: &str) -> Self {
        Error::Parse(s.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
