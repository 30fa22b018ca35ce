use std::fmt;
use std::process::ExitCode;

use sbr_core::corpus::CorpusError;
use sbr_core::ontology::OntologyError;
use sbr_core::pipeline::PipelineError;
use sbr_core::simeng::SimEngError;
use sbr_core::store::StoreError;
use sbr_service::ServiceError;

/// Fatal outcome of a subcommand, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or arguments (exit 1).
    Usage(String),
    /// Inputs could be read but are invalid (exit 2).
    Data(String),
    /// Filesystem or network failure (exit 3).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io(_) => 3,
        })
    }

    pub fn io(context: impl fmt::Display, e: std::io::Error) -> Self {
        CliError::Io(format!("{context}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Io { .. }
            | PipelineError::Ontology(OntologyError::Io(_))
            | PipelineError::Metadata(CorpusError::Io(_))
            | PipelineError::Similarity(SimEngError::Io(_))
            | PipelineError::Store(StoreError::Io(_)) => CliError::Io(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) => CliError::Io(format!("catalog: {e}")),
            other => CliError::Data(format!("catalog: {other}")),
        }
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::InvalidQuery(_) | ServiceError::BadRequest(_) => CliError::Usage(e.to_string()),
            ServiceError::Storage(_) => CliError::Io(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}
