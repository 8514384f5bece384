use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("permutation length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("not a permutation of 1..={n}: {reason}")]
    NotAPermutation { n: usize, reason: String },

    #[error("leading term of the zero polynomial is undefined")]
    ZeroPolynomial,

    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid bubble: {0}")]
    InvalidBubble(String),

    #[error("invalid color split: {0}")]
    InvalidSplit(String),

    #[error("invalid color {color} for a bubble with {d} colors")]
    InvalidColor { color: usize, d: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("bubble is not chain-expressible: {0}")]
    NotChainExpressible(String),

    #[error(
        "{what} of size {n} exceeds the configured bound {n_max} \
         (about {estimated_ops:.3e} elementary operations); use Monte Carlo instead"
    )]
    TooLarge {
        what: &'static str,
        n: usize,
        n_max: usize,
        estimated_ops: f64,
    },

    #[error("numeric dimension {dim} is smaller than n = {n}; the Gram matrix is singular")]
    SingularDimension { dim: u64, n: usize },

    #[error("expected a Laurent polynomial, found {0}")]
    NotPolynomial(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid sampling parameters: {0}")]
    InvalidSampleSpec(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
