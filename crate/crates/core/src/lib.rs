//! Keyword-driven numeric extraction from long documents that mix prose and
//! tables: segment, retrieve, summarize, then extract a single value.

pub mod config;
pub mod document;
pub mod eval;
pub mod extract;
pub mod llm;
pub mod parallel;
pub mod pipeline;
pub mod retrieval;
pub mod segment;
pub mod summarize;
pub mod template;

pub use document::{parse_html_doc, parse_json_doc, DocMetadata, Document, DocumentError, Element, Scale, Table};
pub use extract::{
    build_extraction_prompt, complete_keyword, extract_value, normalize_numeric, CompletionMode, ExtractError,
    NormalizedValue, PromptVariant, ShotConfig,
};
pub use llm::{BackendError, CompletionRequest, CompletionResponse, LlmBackend};
pub use retrieval::{top_segments, Embedder, RetrievalConfig, RetrievalError, TermFrequencyEmbedder};
pub use segment::{segment_document, Segment, SegmentError, SegmenterConfig, SerializationFormat};
pub use summarize::{SummarizationStrategy, SummaryTrace};
pub use template::TemplatePack;
pub use config::{ConfigError, PipelineSettings, SettingsOverride};
pub use pipeline::{run_naive, run_pipeline, PipelineContext, PipelineError, PipelineRun};
pub use eval::{run_benchmark, BenchmarkOptions, DocumentStore, EvalReport, RetaLevels, Task};
