//! Extraction: keyword completion, prompt construction, and normalization of
//! the model's answer into a comparable number.

mod numeric;
mod prompt;

use serde::Serialize;
use thiserror::Error;

use crate::document::Scale;
use crate::llm::{BackendError, CompletionRequest, LlmBackend};
use crate::template::TemplatePack;

pub use numeric::{normalize_numeric, NormalizedValue, NumericError};
pub use prompt::{
    build_extraction_prompt, complete_keyword, CompletionMode, ExampleStyle, PromptVariant, Shot, ShotConfig,
    MAX_SHOTS,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExtractError {
    #[error("document metadata lacks `{0}` required by the completion mode")]
    MissingMetadata(&'static str),
    #[error("summary is empty")]
    EmptySummary,
    #[error("at most {MAX_SHOTS} shots are supported, got {0}")]
    TooManyShots(usize),
    #[error("extraction call failed: {0}")]
    Backend(#[from] BackendError),
    #[error("answer {raw:?} is not usable: {source}")]
    Numeric {
        raw: String,
        #[source]
        source: NumericError,
    },
}

/// Everything needed to ask for one value.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionRequest {
    pub completed_keyword: String,
    pub variant: PromptVariant,
    pub shots: ShotConfig,
    pub scale_hint: Option<Scale>,
    pub max_output_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub prompt: String,
    pub value: NormalizedValue,
}

/// Builds the prompt, calls the backend once, and normalizes the answer.
pub fn extract_value(
    templates: &TemplatePack,
    request: &ExtractionRequest,
    summary: &str,
    backend: &dyn LlmBackend,
) -> Result<Extraction, ExtractError> {
    let (prompt, raw) = ask(templates, request, summary, backend)?;
    let value = normalize_numeric(&raw, request.scale_hint)
        .map_err(|source| ExtractError::Numeric { raw, source })?;
    Ok(Extraction { prompt, value })
}

/// Builds the prompt and returns it with the trimmed raw answer.
pub fn ask(
    templates: &TemplatePack,
    request: &ExtractionRequest,
    summary: &str,
    backend: &dyn LlmBackend,
) -> Result<(String, String), ExtractError> {
    let prompt = build_extraction_prompt(
        templates,
        &request.completed_keyword,
        summary,
        request.variant,
        &request.shots,
    )?;
    let mut completion = CompletionRequest::new(prompt);
    completion.max_output_tokens = request.max_output_tokens;
    let response = backend.complete(&completion)?;
    Ok((completion.prompt, response.text.trim().to_string()))
}
