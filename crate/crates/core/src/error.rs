use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the explanation pipeline.
#[derive(Debug, Error)]
pub enum SmxError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },
    #[error("format error: {0}")]
    Format(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("dimension mismatch: expected {expected}, got {got} ({context})")]
    Dimension {
        expected: usize,
        got: usize,
        context: &'static str,
    },
    #[error("degenerate zone '{0}': all rows identical (zero total variance)")]
    DegenerateZone(String),
    #[error("eigen-iteration did not converge for zone '{zone}' (residual {residual:.3e})")]
    NoConvergence { zone: String, residual: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl SmxError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SmxError::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user-supplied configuration or input files
    /// rather than by a failure inside the pipeline.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            SmxError::Io { .. }
                | SmxError::Parse { .. }
                | SmxError::Format(_)
                | SmxError::Config(_)
                | SmxError::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SmxError>;
