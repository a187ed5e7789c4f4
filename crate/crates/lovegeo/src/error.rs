use std::path::PathBuf;

use lovegeo_core::GeoError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("malformed input {path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error(transparent)]
    Geo(#[from] GeoError),
}

impl CliError {
    /// `2` for bad input or configuration, `1` when a computation failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::Parse { .. } => 2,
            CliError::Write { .. } => 1,
            CliError::Geo(GeoError::Domain(_)) | CliError::Geo(GeoError::OutOfDomain) => 2,
            CliError::Geo(_) => 1,
        }
    }

    pub(crate) fn parse(path: &std::path::Path, reason: impl ToString) -> Self {
        CliError::Parse { path: path.to_path_buf(), reason: reason.to_string() }
    }
}
