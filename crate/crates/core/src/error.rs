use thiserror::Error;

use crate::geometry::CaseLabel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid slope band: need 0 <= alpha < beta <= inf, got alpha={alpha}, beta={beta}")]
    InvalidBand { alpha: f64, beta: f64 },

    #[error("the coupling map needs 0 < alpha < beta < inf (got alpha={alpha}, beta={beta})")]
    DegenerateBand { alpha: f64, beta: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no dominating pair of points exists in the domain")]
    EmptyFeasible,

    #[error("brute-force oracle limited to {limit} points, got {n}")]
    SizeLimit { n: usize, limit: usize },

    #[error("crossing check needs Z > 0")]
    HypothesisNotMet,

    #[error("experiment requires the {expected} case, parameters classify as {actual:?}")]
    WrongCase {
        expected: &'static str,
        actual: CaseLabel,
    },

    #[error("internal logic error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
