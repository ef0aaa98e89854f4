use thiserror::Error;

/// Errors produced by the solvers and model constructors.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} {what}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("point outside the uncertainty box at edge {edge}: {value} not in [{lo}, {hi}]")]
    Domain { edge: usize, value: f64, lo: f64, hi: f64 },

    #[error("rho profile is not nonincreasing in coordinate {coord} at level {level}")]
    NonMonotoneRho { coord: usize, level: usize },

    #[error("infeasible constraint: R(lo) = {r_lo} exceeds budget {budget}")]
    Infeasible { r_lo: f64, budget: f64 },

    #[error("operation not supported for {0}")]
    Unsupported(&'static str),

    #[error("subgradient ascent stalled at iteration {iter}: zero subgradient with gap {gap}")]
    Stalled { iter: usize, gap: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
