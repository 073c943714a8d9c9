//! Pipeline settings and layered overrides.
//!
//! Settings resolve from built-in defaults, then the config file, then a
//! task's own overrides, then command-line flags; later layers win.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::extract::{CompletionMode, PromptVariant, MAX_SHOTS};
use crate::llm::CompletionRequest;
use crate::segment::{SerializationFormat, MIN_SEGMENT_TOKENS};
use crate::summarize::{RefineOrder, SummarizationStrategy};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("max_tokens_per_segment must be at least {MIN_SEGMENT_TOKENS}, got {0}")]
    SegmentBudget(usize),
    #[error("top_n must be at least 1")]
    TopN,
    #[error("shots must be between 0 and {MAX_SHOTS}, got {0}")]
    Shots(usize),
    #[error("parallelism must be at least 1")]
    Parallelism,
    #[error("{0} must be at least 1")]
    ZeroLimit(&'static str),
}

/// Fully resolved settings for one pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineSettings {
    pub format: SerializationFormat,
    pub max_tokens_per_segment: usize,
    pub top_n: usize,
    pub strategy: SummarizationStrategy,
    pub refine_order: RefineOrder,
    pub variant: PromptVariant,
    pub mode: CompletionMode,
    pub shots: usize,
    pub parallelism: usize,
    pub reduce_budget: usize,
    pub max_output_tokens: u32,
    /// Context budget for the truncation baseline, in tokens.
    pub naive_context_tokens: usize,
}

impl Default for PipelineSettings {
    fn default() -> Self {
        PipelineSettings {
            format: SerializationFormat::Plain,
            max_tokens_per_segment: 512,
            top_n: 3,
            strategy: SummarizationStrategy::Refine,
            refine_order: RefineOrder::Document,
            variant: PromptVariant::TdRsp,
            mode: CompletionMode::KTC,
            shots: 1,
            parallelism: 4,
            reduce_budget: 512,
            max_output_tokens: CompletionRequest::DEFAULT_MAX_OUTPUT_TOKENS,
            naive_context_tokens: 1024,
        }
    }
}

impl PipelineSettings {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_tokens_per_segment < MIN_SEGMENT_TOKENS {
            return Err(ConfigError::SegmentBudget(self.max_tokens_per_segment));
        }
        if self.top_n == 0 {
            return Err(ConfigError::TopN);
        }
        if self.shots > MAX_SHOTS {
            return Err(ConfigError::Shots(self.shots));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::Parallelism);
        }
        if self.reduce_budget == 0 {
            return Err(ConfigError::ZeroLimit("reduce_budget"));
        }
        if self.max_output_tokens == 0 {
            return Err(ConfigError::ZeroLimit("max_output_tokens"));
        }
        if self.naive_context_tokens == 0 {
            return Err(ConfigError::ZeroLimit("naive_context_tokens"));
        }
        Ok(())
    }

    /// Returns a copy with every field set in `layer` replaced.
    pub fn with(&self, layer: &SettingsOverride) -> PipelineSettings {
        let mut s = self.clone();
        macro_rules! take {
            ($($f:ident),*) => {$(if let Some(v) = layer.$f { s.$f = v; })*};
        }
        take!(
            format,
            max_tokens_per_segment,
            top_n,
            strategy,
            refine_order,
            variant,
            mode,
            shots,
            parallelism,
            reduce_budget,
            max_output_tokens,
            naive_context_tokens
        );
        s
    }

    /// Applies layers lowest-precedence first and validates the result.
    pub fn resolve(layers: &[&SettingsOverride]) -> Result<PipelineSettings, ConfigError> {
        let s = layers
            .iter()
            .fold(PipelineSettings::default(), |acc, layer| acc.with(layer));
        s.validate()?;
        Ok(s)
    }
}

/// A partial set of settings; absent fields leave the lower layer in place.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingsOverride {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<SerializationFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_tokens_per_segment: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<SummarizationStrategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine_order: Option<RefineOrder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<PromptVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<CompletionMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallelism: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduce_budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_output_tokens: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub naive_context_tokens: Option<usize>,
}

impl SettingsOverride {
    pub fn is_empty(&self) -> bool {
        *self == SettingsOverride::default()
    }
}
