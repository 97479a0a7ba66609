// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A documented precondition was not met by the caller.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("numeric overflow: {0}")]
    NumericOverflow(String),

    /// An iterative estimate hit its iteration cap.
    #[error("{what} did not converge after {iterations} iterations (best estimate {best}, residual {residual:e})")]
    EstimateFailed {
        what: &'static str,
        iterations: usize,
        best: f64,
        residual: f64,
    },

    #[error("derivative order unavailable: requested {requested} columns at t0 = {t0}, source provides {available}")]
    DerivativeOrderUnavailable {
        requested: usize,
        available: usize,
        t0: f64,
    },

    #[error("numeric failure at Arnoldi step {step}: {reason}")]
    NumericFailure { step: usize, reason: String },

    /// The reference solver could not certify its answer by step doubling.
    #[error("reference solution uncertified: relative step-doubling change {change:e} after {steps} steps")]
    OracleUncertified {
        change: f64,
        steps: usize,
        coarse: Vec<num_complex::Complex64>,
        fine: Vec<num_complex::Complex64>,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid expression: {0}")]
    Expression(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::ContractViolation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }

    /// True for failures of the numerics rather than of the input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NumericOverflow(_)
                | Error::EstimateFailed { .. }
                | Error::NumericFailure { .. }
                | Error::OracleUncertified { .. }
        )
    }
}
