use std::path::Path;

use fpulab::FpuError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid run data: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(FpuError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }

    /// 2 usage, 3 I/O, 4 numerical blow-up, 5 bad run data, 6 other model errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Model(FpuError::NumericalBlowUp { .. }) => 4,
            CliError::Schema(_) => 5,
            CliError::Model(FpuError::InvalidParameter(_)) => 2,
            CliError::Model(_) => 6,
        }
    }
}

impl From<FpuError> for CliError {
    fn from(e: FpuError) -> Self {
        CliError::Model(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io { path: "csv".into(), source: std::io::Error::other(e.to_string()) }
    }
}
