use std::fmt;

use hldx_core::llm::BackendError;
use hldx_core::pipeline::PipelineError;
use hldx_core::retrieval::RetrievalError;

/// A failure carrying the process exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub const EXIT_INPUT: u8 = 2;
pub const EXIT_EXTRACTION: u8 = 3;
pub const EXIT_TRANSPORT: u8 = 4;

impl CliError {
    pub fn input(message: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }

    pub fn extraction(message: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_EXTRACTION,
            message: message.to_string(),
        }
    }

    pub fn transport(message: impl fmt::Display) -> Self {
        CliError {
            code: EXIT_TRANSPORT,
            message: message.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        let transport = e.is_transport()
            || matches!(e, PipelineError::Retrieval(RetrievalError::EmbedderUnavailable(_)));
        if transport {
            CliError::transport(e)
        } else {
            CliError::extraction(e)
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::Transport { .. } => CliError::transport(e),
            BackendError::Storage(_) | BackendError::InvalidRequest(_) => CliError::input(e),
            _ => CliError::extraction(e),
        }
    }
}
