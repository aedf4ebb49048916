use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the permea toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation size must be at least 1")]
    EmptyPermutation,

    #[error("images do not form a bijection on [1..{n}]")]
    NotABijection { n: usize },

    #[error("element {element} is outside the ground set [1..{n}]")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("a transposition needs two distinct elements, got {0} twice")]
    DegenerateTransposition(usize),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("cannot parse permutation from {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid distribution parameter: {0}")]
    InvalidDistribution(String),

    #[error("subset size {k} exceeds ground set size {n}")]
    SubsetTooLarge { k: usize, n: usize },

    #[error("swap mutation needs n >= 2, got n = {0}")]
    NoTransposition(usize),

    #[error("jump parameter m = {m} must satisfy 3 <= m <= n = {n}")]
    JumpParameter { n: usize, m: usize },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid experiment configuration: {0}")]
    Config(String),

    #[error("unknown name {0:?}")]
    UnknownName(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
