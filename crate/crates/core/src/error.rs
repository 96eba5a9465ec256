use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("tail fit failed: {0}")]
    Fit(String),

    #[error(
        "quadrature did not converge for k={k}: estimated error {estimate:.3e} > tolerance {tolerance:.3e} after {panels} panels"
    )]
    Quadrature {
        k: i64,
        estimate: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("linear system at grid point p={p} is singular or ill-conditioned (condition estimate {condition:.3e})")]
    Inversion { p: usize, condition: f64 },

    #[error("radial integration not accurate enough at q={q}: {reason}")]
    Accuracy { q: f64, reason: String },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Self::Domain(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Self::Input(msg.into())
    }
}
