//! Keyword-focused summarization of retrieved segments.
//!
//! Refine threads one evolving summary through the segments in order.
//! Map-Reduce summarizes each segment independently (concurrently) and then
//! merges the partial summaries.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llm::{BackendError, CompletionRequest, LlmBackend};
use crate::parallel::parallel_map;
use crate::segment::{count_tokens, Segment};
use crate::template::{render, TemplatePack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummarizationStrategy {
    #[default]
    Refine,
    MapReduce,
}

impl fmt::Display for SummarizationStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SummarizationStrategy::Refine => "refine",
            SummarizationStrategy::MapReduce => "map_reduce",
        })
    }
}

impl FromStr for SummarizationStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "refine" => Ok(SummarizationStrategy::Refine),
            "map_reduce" | "mapreduce" => Ok(SummarizationStrategy::MapReduce),
            other => Err(format!("unknown summarization strategy `{other}`")),
        }
    }
}

/// Order in which Refine visits the retrieved segments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefineOrder {
    #[default]
    Document,
    Similarity,
}

impl FromStr for RefineOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "document" => Ok(RefineOrder::Document),
            "similarity" => Ok(RefineOrder::Similarity),
            other => Err(format!("unknown refine order `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CallPurpose {
    Init,
    Refine,
    Map,
    Reduce,
}

impl fmt::Display for CallPurpose {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmCall {
    pub purpose: CallPurpose,
    pub prompt: String,
    pub response: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SummaryTrace {
    pub final_summary: String,
    pub llm_calls: Vec<LlmCall>,
}

impl SummaryTrace {
    pub fn count(&self, purpose: CallPurpose) -> usize {
        self.llm_calls.iter().filter(|c| c.purpose == purpose).count()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SummarizeError {
    #[error("no segments to summarize")]
    NoSegments,
    #[error("{purpose} call {call} failed: {source}")]
    Backend {
        /// 0-based index of the failing call within its phase.
        call: usize,
        purpose: CallPurpose,
        #[source]
        source: BackendError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SummarizerOptions {
    /// Maximum concurrent map calls.
    pub parallelism: usize,
    /// Token limit for one reduce input; larger inputs are reduced in batches.
    pub reduce_budget: usize,
    pub max_output_tokens: u32,
}

impl Default for SummarizerOptions {
    fn default() -> Self {
        SummarizerOptions {
            parallelism: 4,
            reduce_budget: 512,
            max_output_tokens: CompletionRequest::DEFAULT_MAX_OUTPUT_TOKENS,
        }
    }
}

fn call(
    backend: &dyn LlmBackend,
    prompt: String,
    opts: &SummarizerOptions,
    purpose: CallPurpose,
    index: usize,
) -> Result<LlmCall, SummarizeError> {
    let mut request = CompletionRequest::new(prompt);
    request.max_output_tokens = opts.max_output_tokens;
    let response = backend
        .complete(&request)
        .map_err(|source| SummarizeError::Backend {
            call: index,
            purpose,
            source,
        })?;
    Ok(LlmCall {
        purpose,
        prompt: request.prompt,
        response: response.text.trim().to_string(),
    })
}

/// One Init call on the first segment, then one Refine call per further
/// segment, each carrying the previous response forward.
pub fn refine_summarize(
    keyword: &str,
    segments: &[&Segment],
    backend: &dyn LlmBackend,
    templates: &TemplatePack,
    opts: &SummarizerOptions,
) -> Result<SummaryTrace, SummarizeError> {
    let (first, rest) = segments.split_first().ok_or(SummarizeError::NoSegments)?;
    let init = render(
        &templates.refine_init,
        &[("keyword", keyword), ("segment", &first.text)],
    );
    let mut calls = vec![call(backend, init, opts, CallPurpose::Init, 0)?];
    for (i, seg) in rest.iter().enumerate() {
        let current = calls.last().expect("at least one call").response.clone();
        let prompt = render(
            &templates.refine_step,
            &[
                ("keyword", keyword),
                ("current_summary", &current),
                ("segment", &seg.text),
            ],
        );
        calls.push(call(backend, prompt, opts, CallPurpose::Refine, i + 1)?);
    }
    Ok(SummaryTrace {
        final_summary: calls.last().expect("at least one call").response.clone(),
        llm_calls: calls,
    })
}

/// Map calls run concurrently; partial summaries are merged in document
/// order. A single segment skips the reduce step.
pub fn map_reduce_summarize(
    keyword: &str,
    segments: &[&Segment],
    backend: &dyn LlmBackend,
    templates: &TemplatePack,
    opts: &SummarizerOptions,
) -> Result<SummaryTrace, SummarizeError> {
    if segments.is_empty() {
        return Err(SummarizeError::NoSegments);
    }
    let mut ordered = segments.to_vec();
    ordered.sort_by_key(|s| s.position);

    let results = parallel_map(&ordered, opts.parallelism, |i, seg| {
        let prompt = render(&templates.map, &[("keyword", keyword), ("segment", &seg.text)]);
        call(backend, prompt, opts, CallPurpose::Map, i)
    });
    let mut calls = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    if calls.len() == 1 {
        return Ok(SummaryTrace {
            final_summary: calls[0].response.clone(),
            llm_calls: calls,
        });
    }

    let mut outputs: Vec<String> = calls.iter().map(|c| c.response.clone()).collect();
    let mut reduce_index = 0;
    loop {
        let joined = outputs.join("\n\n");
        if count_tokens(&joined) <= opts.reduce_budget || outputs.len() <= 2 {
            let prompt = render(&templates.reduce, &[("keyword", keyword), ("map_outputs", &joined)]);
            let c = call(backend, prompt, opts, CallPurpose::Reduce, reduce_index)?;
            let final_summary = c.response.clone();
            calls.push(c);
            return Ok(SummaryTrace {
                final_summary,
                llm_calls: calls,
            });
        }
        // Too long for one reduce: reduce budget-sized batches of at least
        // two outputs, then repeat on the batch results.
        let mut next = Vec::new();
        for batch in reduce_batches(&outputs, opts.reduce_budget) {
            if batch.len() == 1 {
                next.push(batch[0].clone());
                continue;
            }
            let prompt = render(
                &templates.reduce,
                &[("keyword", keyword), ("map_outputs", &batch.join("\n\n"))],
            );
            let c = call(backend, prompt, opts, CallPurpose::Reduce, reduce_index)?;
            reduce_index += 1;
            next.push(c.response.clone());
            calls.push(c);
        }
        outputs = next;
    }
}

fn reduce_batches(outputs: &[String], budget: usize) -> Vec<Vec<String>> {
    let mut batches: Vec<Vec<String>> = Vec::new();
    let mut current: Vec<String> = Vec::new();
    for out in outputs {
        if current.len() >= 2 {
            let mut joined = current.join("\n\n");
            joined.push_str("\n\n");
            joined.push_str(out);
            if count_tokens(&joined) > budget {
                batches.push(std::mem::take(&mut current));
            }
        }
        current.push(out.clone());
    }
    if !current.is_empty() {
        batches.push(current);
    }
    batches
}
