use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("integration failed at step {step}: {reason}")]
    Integration { step: usize, reason: String },

    #[error("matrix is not positive semi-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveSemiDefinite { min_eigenvalue: f64 },

    #[error("ill-posed analysis: {0}")]
    IllPosedAnalysis(String),

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config field `{field}`: {message}")]
    ConfigInvalid { field: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Re-tags an integration failure with the step index it occurred at.
    pub fn at_step(self, step: usize) -> Self {
        match self {
            Error::Integration { reason, .. } => Error::Integration { step, reason },
            other => other,
        }
    }

    /// True for errors that stem from a bad configuration file or value.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse { .. } | Error::ConfigInvalid { .. }
        )
    }

    /// True for numerical failures (blow-up, ill-posed analysis, non-PSD input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Integration { .. }
                | Error::NotPositiveSemiDefinite { .. }
                | Error::IllPosedAnalysis(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
