use std::path::PathBuf;

use thiserror::Error;

use crate::stepper::StepReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration or argument. `key` names the offending setting.
    #[error("configuration error in `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("non-finite value at Picard iteration {iteration}: {context}")]
    NonFinite { iteration: usize, context: String },

    #[error("field contains non-finite coefficients")]
    NonFiniteField,

    #[error("step rejected at t = {t_last} (last accepted time); {report}")]
    Rejected {
        t_last: f64,
        report: Box<StepReport>,
    },

    #[error("no contraction at probe scale T = {probe}")]
    NoContraction { probe: f64 },

    #[error("convolution oracle refused grid {nx}x{ny}: limited to 16x16 unless overridden")]
    OracleTooLarge { nx: usize, ny: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("snapshot format error in {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("snapshot dimension mismatch: expected {expected:?}, found {found:?}")]
    Dimension {
        expected: (usize, usize),
        found: (usize, usize),
    },
}

impl Error {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::OracleTooLarge { .. } => 1,
            Error::NonFinite { .. }
            | Error::NonFiniteField
            | Error::Rejected { .. }
            | Error::NoContraction { .. } => 2,
            Error::Io { .. } | Error::Format { .. } | Error::Dimension { .. } => 3,
        }
    }
}
