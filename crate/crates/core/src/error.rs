use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library.
///
/// Guard and node-limit failures are kept separate from domain errors so the
/// CLI can map them to a distinct exit status.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ground parameters n={n}, k={k}: {reason}")]
    InvalidParams { n: u32, k: u32, reason: String },

    #[error("element {element} is outside the ground set [1, {n}]")]
    ElementOutOfRange { element: u32, n: u32 },

    #[error("set {set} does not have exactly {k} elements")]
    WrongUniformity { set: String, k: u32 },

    #[error("duplicate set {0} in family input")]
    DuplicateSet(String),

    #[error("requested {requested} random sets but only {available} k-sets exist")]
    TooManySets { requested: u128, available: u128 },

    #[error("families live over different ground parameters ({left} vs {right})")]
    ParamMismatch { left: String, right: String },

    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: u64, max: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} needs {size} units of work, above the guard of {limit}")]
    GuardExceeded {
        what: String,
        size: u128,
        limit: u128,
    },

    #[error("solver stopped after {nodes} nodes without proving optimality (best so far {best})")]
    Inexact { nodes: u64, best: usize },

    #[error("cannot parse family spec {spec:?}: {reason}")]
    BadSpec { spec: String, reason: String },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for guard and solver-budget failures, which the CLI reports
    /// with exit status 2 instead of 1.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::GuardExceeded { .. } | Error::Inexact { .. })
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
