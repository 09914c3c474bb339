use std::path::PathBuf;
use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A partition does not match the node set it is evaluated against.
    #[error("inconsistent partition: {0}")]
    Consistency(String),

    #[error("capacity violated: {nodes} nodes cannot fit in {groups} groups of at most {capacity}")]
    Capacity {
        nodes: usize,
        groups: usize,
        capacity: usize,
    },

    #[error("instance too large for enumeration: {assignments:.3e} assignments exceeds the limit of {limit:.0e}")]
    TooLarge { assignments: f64, limit: f64 },

    #[error("exact search timed out after {0:.3?}")]
    Timeout(Duration),

    #[error("malformed file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
