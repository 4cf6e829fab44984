use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("ground-state relaxation did not converge after {steps} steps (last energy {last_energy} K)")]
    RelaxationDiverged { steps: usize, last_energy: f64 },

    #[error("norm drifted to {norm} at tau = {tau}; refine d_tau or the grid")]
    NormDrift { tau: f64, norm: f64 },

    #[error("tridiagonal solver hit a zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("envelope fit underdetermined: {0}")]
    FitUnderdetermined(String),

    #[error("{path}:{line}: {message}")]
    ConfigSyntax {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
