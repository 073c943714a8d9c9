//! The end-to-end flow for one (document, keyword) pair, plus the
//! truncation baseline used for comparison.

use serde::Serialize;
use thiserror::Error;

use crate::config::PipelineSettings;
use crate::document::Document;
use crate::extract::{
    self, complete_keyword, normalize_numeric, ExtractError, ExtractionRequest, NormalizedValue, NumericError,
    ShotConfig,
};
use crate::llm::{BackendError, LlmBackend};
use crate::retrieval::{top_segments, Embedder, RetrievalConfig, RetrievalError};
use crate::segment::{segment_document, serialize_document, RunTokenizer, SegmentError, SegmenterConfig, Tokenizer};
use crate::summarize::{
    map_reduce_summarize, refine_summarize, RefineOrder, SummarizationStrategy, SummarizeError, SummarizerOptions,
    SummaryTrace,
};
use crate::template::TemplatePack;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Segment(#[from] SegmentError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Summarize(#[from] SummarizeError),
    #[error(transparent)]
    Extract(#[from] ExtractError),
}

impl PipelineError {
    /// The backend error underneath, if the failure came from an LLM call.
    pub fn backend_error(&self) -> Option<&BackendError> {
        match self {
            PipelineError::Summarize(SummarizeError::Backend { source, .. }) => Some(source),
            PipelineError::Extract(ExtractError::Backend(e)) => Some(e),
            _ => None,
        }
    }

    pub fn is_transport(&self) -> bool {
        matches!(self.backend_error(), Some(BackendError::Transport { .. }))
    }
}

/// Shared collaborators for pipeline runs.
#[derive(Clone, Copy)]
pub struct PipelineContext<'a> {
    pub backend: &'a dyn LlmBackend,
    pub embedder: &'a dyn Embedder,
    pub templates: &'a TemplatePack,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Retrieved {
    pub position: usize,
    pub score: f64,
}

/// Everything a run produced. The answer may still fail to normalize; that
/// outcome is kept in `value` rather than discarding the trace.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub completed_keyword: String,
    pub segment_count: usize,
    pub retrieved: Vec<Retrieved>,
    pub trace: Option<SummaryTrace>,
    pub prompt: String,
    pub raw_answer: String,
    pub value: Result<NormalizedValue, NumericError>,
}

impl PipelineRun {
    pub fn llm_calls(&self) -> usize {
        self.trace.as_ref().map_or(0, |t| t.llm_calls.len()) + 1
    }
}

fn extraction_request(
    doc: &Document,
    keyword: &str,
    settings: &PipelineSettings,
) -> Result<ExtractionRequest, ExtractError> {
    Ok(ExtractionRequest {
        completed_keyword: complete_keyword(keyword, &doc.metadata, settings.mode)?,
        variant: settings.variant,
        shots: ShotConfig::builtin(settings.shots)?,
        scale_hint: doc.metadata.scale_hint,
        max_output_tokens: settings.max_output_tokens,
    })
}

fn finish(
    request: ExtractionRequest,
    summary: &str,
    ctx: &PipelineContext<'_>,
    segment_count: usize,
    retrieved: Vec<Retrieved>,
    trace: Option<SummaryTrace>,
) -> Result<PipelineRun, PipelineError> {
    let (prompt, raw_answer) = extract::ask(ctx.templates, &request, summary, ctx.backend)?;
    let value = normalize_numeric(&raw_answer, request.scale_hint);
    Ok(PipelineRun {
        completed_keyword: request.completed_keyword,
        segment_count,
        retrieved,
        trace,
        prompt,
        raw_answer,
        value,
    })
}

/// Segment, complete the keyword, retrieve, summarize, extract.
pub fn run_pipeline(
    doc: &Document,
    keyword: &str,
    settings: &PipelineSettings,
    ctx: &PipelineContext<'_>,
) -> Result<PipelineRun, PipelineError> {
    let request = extraction_request(doc, keyword, settings)?;
    let seg_cfg = SegmenterConfig::new(settings.max_tokens_per_segment, settings.format)?;
    let segments = segment_document(doc, &seg_cfg)?;
    let scored = top_segments(
        ctx.embedder,
        &request.completed_keyword,
        &segments,
        &RetrievalConfig { top_n: settings.top_n },
    )?;
    let retrieved: Vec<Retrieved> = scored
        .iter()
        .map(|s| Retrieved {
            position: s.segment.position,
            score: s.score,
        })
        .collect();

    let mut chosen: Vec<_> = scored.iter().map(|s| s.segment).collect();
    if settings.refine_order == RefineOrder::Document {
        chosen.sort_by_key(|s| s.position);
    }
    let opts = SummarizerOptions {
        parallelism: settings.parallelism,
        reduce_budget: settings.reduce_budget,
        max_output_tokens: settings.max_output_tokens,
    };
    let keyword = &request.completed_keyword;
    let trace = match settings.strategy {
        SummarizationStrategy::Refine => refine_summarize(keyword, &chosen, ctx.backend, ctx.templates, &opts)?,
        SummarizationStrategy::MapReduce => {
            map_reduce_summarize(keyword, &chosen, ctx.backend, ctx.templates, &opts)?
        }
    };
    let summary = trace.final_summary.clone();
    finish(request, &summary, ctx, segments.len(), retrieved, Some(trace))
}

/// Keeps the first `max_tokens` tokens of `text`, cutting at a token end.
pub fn truncate_tokens(text: &str, max_tokens: usize) -> &str {
    let spans = RunTokenizer.token_spans(text);
    match spans.get(max_tokens.wrapping_sub(1)) {
        Some(span) if spans.len() > max_tokens => &text[..span.end],
        _ if max_tokens == 0 => "",
        _ => text,
    }
}

/// The baseline: serialize the whole document, keep its head up to the
/// context budget, and ask for the value in one prompt.
pub fn run_naive(
    doc: &Document,
    keyword: &str,
    settings: &PipelineSettings,
    ctx: &PipelineContext<'_>,
) -> Result<PipelineRun, PipelineError> {
    let request = extraction_request(doc, keyword, settings)?;
    let full = serialize_document(doc, settings.format);
    let context = truncate_tokens(&full, settings.naive_context_tokens);
    if context.trim().is_empty() {
        return Err(SegmentError::EmptyDocument(doc.id.clone()).into());
    }
    finish(request, context, ctx, 0, Vec::new(), None)
}
