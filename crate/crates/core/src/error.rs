use thiserror::Error;

use crate::family::FamilyKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} must be strictly positive, got {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{kind} takes {expected} parameters, got {got}")]
    Arity {
        kind: FamilyKind,
        expected: usize,
        got: usize,
    },

    #[error("probability {0} outside the open interval (0, 1)")]
    Probability(f64),

    #[error("{0} overflowed the representable range")]
    Overflow(&'static str),

    #[error("{0} underflowed to zero")]
    Underflow(&'static str),

    #[error("{what} did not converge after {iterations} iterations")]
    Convergence {
        what: &'static str,
        iterations: usize,
    },

    #[error("claim at index {index} is not strictly positive: {value}")]
    NonPositiveClaim { index: usize, value: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("unsupported family: {0}")]
    UnsupportedKind(String),

    #[error("every start failed while fitting {kind}: {}", diagnostics.join("; "))]
    AllStartsFailed {
        kind: FamilyKind,
        diagnostics: Vec<String>,
    },

    #[error("{failed} of {total} bootstrap refits failed (limit is 10%)")]
    BootstrapRefits { failed: usize, total: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub(crate) fn positive(what: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Domain { what, value })
    }
}

pub(crate) fn probability(p: f64) -> Result<f64> {
    if p > 0.0 && p < 1.0 {
        Ok(p)
    } else {
        Err(Error::Probability(p))
    }
}
