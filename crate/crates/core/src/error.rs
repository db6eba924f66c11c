use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}: {text}")]
    Parse {
        line: usize,
        text: String,
        message: String,
    },

    #[error("failed to read {path}: {source}")]
    Input { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {0} has no outgoing triples")]
    NoTriples(String),

    #[error("predicate {0} is not used by any subject")]
    UnusedPredicate(String),

    #[error("nodes {0} and {1} share no predicate")]
    NoCommonPredicate(String, String),

    #[error("literal similarity undefined: both lexical forms are empty after tokenization")]
    EmptyLiterals,

    #[error("unscorable run: {0}")]
    Unscorable(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
