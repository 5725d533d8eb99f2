//! Error classification driving the process exit code:
//! 0 success, 2 config error, 3 data error, 4 backend exhaustion.

use sempres_core::dataset::DatasetError;
use sempres_core::emoji::LexiconError;
use sempres_core::gateway::GatewayError;
use sempres_core::judge::{JudgeError, SensitivityError};

#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Data(anyhow::Error),
    Backend(anyhow::Error),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn config(err: impl Into<anyhow::Error>) -> Self {
        CliError::Config(err.into())
    }

    pub fn data(err: impl Into<anyhow::Error>) -> Self {
        CliError::Data(err.into())
    }

    pub fn backend(err: impl Into<anyhow::Error>) -> Self {
        CliError::Backend(err.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Backend(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(e) => format!("config error: {e:#}"),
            CliError::Data(e) => format!("data error: {e:#}"),
            CliError::Backend(e) => format!("backend error: {e:#}"),
        }
    }

    /// Prefixes the failing pipeline stage, preserving the classification.
    pub fn at_stage(self, stage: &str) -> Self {
        match self {
            CliError::Config(e) => CliError::Config(e.context(format!("stage {stage}"))),
            CliError::Data(e) => CliError::Data(e.context(format!("stage {stage}"))),
            CliError::Backend(e) => CliError::Backend(e.context(format!("stage {stage}"))),
        }
    }
}

impl From<LexiconError> for CliError {
    fn from(e: LexiconError) -> Self {
        CliError::data(e)
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::PartialRun { .. } => CliError::backend(e),
            other => CliError::data(other),
        }
    }
}

impl From<JudgeError> for CliError {
    fn from(e: JudgeError) -> Self {
        CliError::backend(e)
    }
}

impl From<SensitivityError> for CliError {
    fn from(e: SensitivityError) -> Self {
        match e {
            SensitivityError::Judge(_) => CliError::backend(e),
            other => CliError::data(other),
        }
    }
}

impl From<GatewayError> for CliError {
    fn from(e: GatewayError) -> Self {
        CliError::config(e)
    }
}

impl From<sempres_core::metrics::MetricsError> for CliError {
    fn from(e: sempres_core::metrics::MetricsError) -> Self {
        CliError::data(e)
    }
}
