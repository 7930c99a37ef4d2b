use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{function}: argument {value} outside the domain ({requirement})")]
    Domain {
        function: &'static str,
        value: f64,
        requirement: &'static str,
    },

    #[error("{0}: empty input")]
    Empty(&'static str),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no observations: {0} requires n >= 1")]
    NoData(&'static str),

    #[error("non-finite value {value} from {source_name} at node {node}")]
    NonFinite {
        source_name: &'static str,
        node: usize,
        value: f64,
    },

    #[error("density does not normalize: {0}")]
    NotIntegrable(String),

    #[error("support violation: {0}")]
    Support(String),

    #[error("sampler failure: {0}")]
    Sampler(String),

    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
