use std::path::PathBuf;

/// Errors raised by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("function evaluation failed at ({t}, {tau}): {reason}")]
    Evaluation { t: f64, tau: f64, reason: String },

    #[error("inadmissible problem: {0}")]
    Inadmissible(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by the filesystem or a malformed input file.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Parse { .. } | Error::Json(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
