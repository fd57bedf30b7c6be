use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("incompatible scalars: {0}")]
    Incompatible(String),
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("expected a nonconstant polynomial")]
    Constant,
    #[error("binomial index k={k} exceeds l={l}")]
    BinomialRange { l: u64, k: u64 },
    #[error("augmentation value must exceed {base}, got {gamma}")]
    NonMonotone { base: String, gamma: String },
    #[error("witness of degree {deg} is not below deg Q = {deg_q}")]
    WitnessDegree { deg: usize, deg_q: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameter `{key}`: {msg}")]
    Param { key: String, msg: String },
    #[error("index {i} is below the stabilization index {need}")]
    IndexTooSmall { i: usize, need: usize },
    #[error("inconclusive within horizon: {0}")]
    Inconclusive(String),
    #[error("{0}")]
    Precondition(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(key: &str, msg: impl Into<String>) -> Error {
    Error::Param { key: key.to_string(), msg: msg.into() }
}
