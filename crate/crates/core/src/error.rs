//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by dataset construction, the engines, analysis, the
/// oracle, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested cluster count admits no (r,t)-accordant clustering.
    #[error(
        "no (r={r}, t={t})-accordant clustering exists for k={k}; feasible range is 1..={max_k}"
    )]
    Infeasible {
        k: usize,
        r: usize,
        t: f64,
        max_k: usize,
    },

    /// More centers requested than points available.
    #[error("cannot initialize {k} centers from {n} points")]
    InitTooManyClusters { k: usize, n: usize },

    /// Distinct-groups initialization needs at least as many groups as centers.
    #[error("distinct-groups initialization needs k <= m, got k={k} with m={m} groups")]
    InitTooFewGroups { k: usize, m: usize },

    /// Parameter or input violates a documented invariant.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A quality metric is undefined for the given clustering.
    #[error("metric undefined: {0}")]
    MetricUndefined(String),

    /// Exhaustive enumeration would exceed the oracle budget.
    #[error("enumeration budget exceeded: instance requires {required:.3e} assignments, budget is {budget:.3e}")]
    BudgetExceeded { required: f64, budget: f64 },

    /// Dataset ingestion failed.
    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("result file error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn ingest(msg: impl Into<String>) -> Self {
        Error::Ingest(msg.into())
    }
}
