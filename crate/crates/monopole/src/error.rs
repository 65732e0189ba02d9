//! Error type shared by every stage of the pipeline.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("hypergeometric series diverges at z = 1 (c - a - b = {0})")]
    Divergent(f64),

    #[error("invalid index (m, n) = ({m}, {n}): {reason}")]
    InvalidIndex { m: i64, n: i64, reason: String },

    #[error("root solve failed: {0}")]
    RootSolve(String),

    #[error("modulus error: {0}")]
    Modulus(String),

    #[error("lattice sum needs radius {0:.1}, above the cap of 64")]
    TruncationCap(f64),

    #[error("pole proximity: |denominator| = {0:e}")]
    Pole(f64),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("conditioning error: {0}")]
    Conditioning(String),

    #[error("degenerate denominator: {0}")]
    Degenerate(String),

    #[error("period matrix not positive definite: {0}")]
    NotPositive(String),

    #[error("winding vector off the lattice (residual {0:e})")]
    Convention(f64),

    #[error("denominator theta vanishes at the chosen argument")]
    DivisorCollision,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization: {0}")]
    Serialize(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
