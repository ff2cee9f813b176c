use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// A flag or config entry is missing, malformed or out of range.
    #[error("invalid `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Numeric(#[from] ldeconf_core::Error),
}

impl CliError {
    pub fn invalid(field: &str, reason: impl ToString) -> Self {
        Self::Validation {
            field: field.to_string(),
            reason: reason.to_string(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Validation { .. } | Self::Read { .. } => 2,
            Self::Write { .. } | Self::Numeric(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags a core error raised while checking an input as a validation error of `field`.
pub trait FieldContext<T> {
    fn field(self, field: &str) -> CliResult<T>;
}

impl<T> FieldContext<T> for ldeconf_core::Result<T> {
    fn field(self, field: &str) -> CliResult<T> {
        self.map_err(|e| CliError::invalid(field, e))
    }
}
