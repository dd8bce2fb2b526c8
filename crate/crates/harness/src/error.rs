use thiserror::Error;

/// Failures surfaced by the harness, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Malformed scenario text.
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed input that violates a scenario constraint.
    #[error("invalid field '{field}': {message}")]
    Validation { field: String, message: String },

    /// A computation produced non-finite or inconsistent numbers.
    #[error("numerical failure in {context}: {message}")]
    Numerical { context: String, message: String },

    /// The requested output cannot be produced for this report.
    #[error("{0}")]
    Output(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Wraps a library error raised while building or running `field`.
    ///
    /// Errors that can only come from arithmetic going wrong are numerical;
    /// everything else means the input was unusable.
    pub fn from_core(field: &str, e: syncsub::Error) -> Self {
        use syncsub::Error as E;
        match e {
            E::NotOrthonormal { .. }
            | E::MultiplicityRounding { .. }
            | E::ProjectorNotIdempotent { .. } => Self::Numerical {
                context: field.to_string(),
                message: e.to_string(),
            },
            other => Self::validation(field, other.to_string()),
        }
    }

    /// 2 for unusable input, 3 for numerical failure. Bound violations are
    /// not errors; they exit with 1 through the report verdicts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Numerical { .. } => 3,
            Self::Parse { .. } | Self::Validation { .. } | Self::Output(_) | Self::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
