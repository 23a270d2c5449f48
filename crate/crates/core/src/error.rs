use thiserror::Error;

use crate::rangefinder::RangeBasis;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("SVD failed to converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// The adaptive range finder hit `max_rank` before the stopping rule fired.
    /// The partial basis is returned so callers can inspect how far it got.
    #[error("range finder exceeded max rank {max_rank} (spectrum does not decay below tolerance)")]
    RankOverflow {
        max_rank: usize,
        partial: Box<RangeBasis>,
    },

    #[error("near-nongeneric core problem: gap {gap:e} <= {threshold:e}; perturb the rank and retry")]
    NearNongeneric { gap: f64, threshold: f64 },

    #[error("nongeneric TLS problem: sigma_n(A) = {sigma_n:e} <= sigma_(n+1)([A, b]) = {sigma_aug:e}")]
    Nongeneric { sigma_n: f64, sigma_aug: f64 },

    #[error("invalid truncation t = {t}: {reason}")]
    InvalidTruncation { t: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI on failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "INVALID_INPUT",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::NoConvergence { .. } => "NO_CONVERGENCE",
            Error::RankOverflow { .. } => "RANK_OVERFLOW",
            Error::NearNongeneric { .. } => "NEAR_NONGENERIC",
            Error::Nongeneric { .. } => "NONGENERIC",
            Error::InvalidTruncation { .. } => "INVALID_TRUNCATION",
            Error::Parse(_) => "PARSE",
            Error::Io(_) => "IO",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
