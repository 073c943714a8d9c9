//! Runs task files through the pipeline (and optionally the truncation
//! baseline) and scores every answer at every RETA level.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use super::metrics::{accuracy, reta_correct, relative_error, MetricError, RetaLevels};
use super::report::{Comparison, EvalReport, PipelineReport, TaskOutcome};
use super::task::{fold_text, Task, Truth};
use crate::config::{ConfigError, PipelineSettings, SettingsOverride};
use crate::document::{parse_html_doc, parse_json_doc, DocMetadata, Document, DocumentError};
use crate::llm::CountingBackend;
use crate::parallel::parallel_map;
use crate::pipeline::{run_naive, run_pipeline, PipelineContext, PipelineError, PipelineRun};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("document not found: {0}")]
    DocumentNotFound(String),
    #[error("document {doc_ref}: {source}")]
    Document {
        doc_ref: String,
        #[source]
        source: DocumentError,
    },
    #[error("task {index}: {source}")]
    InvalidTaskConfig {
        index: usize,
        #[source]
        source: ConfigError,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Where task `doc` references are resolved.
#[derive(Debug, Clone)]
pub enum DocumentStore {
    /// A reference is a path relative to the directory, or an id naming
    /// `<id>.json` or `<id>.html` inside it.
    Directory(PathBuf),
    Memory(BTreeMap<String, Document>),
}

impl DocumentStore {
    pub fn memory(docs: impl IntoIterator<Item = Document>) -> Self {
        DocumentStore::Memory(docs.into_iter().map(|d| (d.id.clone(), d)).collect())
    }

    pub fn load(&self, doc_ref: &str) -> Result<Document, HarnessError> {
        match self {
            DocumentStore::Memory(docs) => docs
                .get(doc_ref)
                .cloned()
                .ok_or_else(|| HarnessError::DocumentNotFound(doc_ref.to_string())),
            DocumentStore::Directory(dir) => {
                let candidates = [
                    dir.join(doc_ref),
                    dir.join(format!("{doc_ref}.json")),
                    dir.join(format!("{doc_ref}.html")),
                ];
                let path = candidates
                    .iter()
                    .find(|p| p.is_file())
                    .ok_or_else(|| HarnessError::DocumentNotFound(doc_ref.to_string()))?;
                load_document(path).map_err(|source| HarnessError::Document {
                    doc_ref: doc_ref.to_string(),
                    source,
                })
            }
        }
    }
}

/// Reads a JSON document, or an HTML page whose id is its file stem.
pub fn load_document(path: &Path) -> Result<Document, DocumentError> {
    let bytes = fs::read(path).map_err(|e| DocumentError::MalformedInput(format!("{}: {e}", path.display())))?;
    let is_html = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("html") || e.eq_ignore_ascii_case("htm"));
    if is_html {
        let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("document");
        parse_html_doc(&bytes, id, DocMetadata::default())
    } else {
        parse_json_doc(&bytes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Segment, retrieve, summarize, extract.
    Pipeline,
    /// Truncate the serialized document and prompt once.
    Naive,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Pipeline => "aie",
            Method::Naive => "naive",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "aie" | "pipeline" => Ok(Method::Pipeline),
            "naive" => Ok(Method::Naive),
            other => Err(format!("unknown method `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkOptions {
    pub levels: RetaLevels,
    pub methods: Vec<Method>,
    /// Settings from the config file; tasks override these.
    pub file_settings: SettingsOverride,
    /// Settings from the command line; these override tasks.
    pub cli_settings: SettingsOverride,
}

impl Default for BenchmarkOptions {
    fn default() -> Self {
        BenchmarkOptions {
            levels: RetaLevels::default(),
            methods: vec![Method::Pipeline],
            file_settings: SettingsOverride::default(),
            cli_settings: SettingsOverride::default(),
        }
    }
}

impl BenchmarkOptions {
    pub fn settings_for(&self, task: &Task) -> Result<PipelineSettings, ConfigError> {
        PipelineSettings::resolve(&[&self.file_settings, &task.config, &self.cli_settings])
    }
}

/// Scores one run against the truth at every level.
pub fn score(
    index: usize,
    task: &Task,
    result: Result<PipelineRun, PipelineError>,
    llm_calls: u64,
    levels: &RetaLevels,
) -> TaskOutcome {
    let mut outcome = TaskOutcome {
        index,
        doc: task.doc.clone(),
        keyword: task.keyword.clone(),
        truth: task.truth.clone(),
        completed_keyword: None,
        raw_answer: None,
        predicted: None,
        relative_error: None,
        correct: vec![false; levels.len()],
        failure: None,
        llm_calls,
    };
    let run = match result {
        Ok(run) => run,
        Err(e) => {
            outcome.failure = Some(e.to_string());
            return outcome;
        }
    };
    outcome.completed_keyword = Some(run.completed_keyword.clone());
    outcome.raw_answer = Some(run.raw_answer.clone());
    match &task.truth {
        Truth::Text(expected) => {
            let hit = fold_text(expected) == fold_text(&run.raw_answer);
            outcome.correct = vec![hit; levels.len()];
        }
        Truth::Number(truth) => match run.value {
            Ok(v) => {
                outcome.predicted = Some(v.magnitude);
                outcome.relative_error = relative_error(v.magnitude, *truth);
                outcome.correct = levels
                    .as_slice()
                    .iter()
                    .map(|&t| reta_correct(v.magnitude, *truth, t))
                    .collect();
            }
            Err(e) => outcome.failure = Some(e.to_string()),
        },
    }
    outcome
}

/// Aggregates scored tasks into per-level accuracy.
pub fn summarize_outcomes(
    name: &str,
    mut tasks: Vec<TaskOutcome>,
    levels: &RetaLevels,
) -> Result<PipelineReport, MetricError> {
    tasks.sort_by_key(|t| t.index);
    let accuracy = (0..levels.len())
        .map(|i| accuracy(&tasks.iter().map(|t| t.correct[i]).collect::<Vec<_>>()))
        .collect::<Result<Vec<_>, _>>()?;
    let average = accuracy.iter().sum::<f64>() / accuracy.len() as f64;
    Ok(PipelineReport {
        name: name.to_string(),
        task_count: tasks.len(),
        llm_calls: tasks.iter().map(|t| t.llm_calls).sum(),
        accuracy,
        average,
        tasks,
    })
}

/// Runs every task under every requested method. Per-task failures are
/// recorded in the report; unresolvable documents abort the run.
pub fn run_benchmark(
    tasks: &[Task],
    store: &DocumentStore,
    options: &BenchmarkOptions,
    ctx: &PipelineContext<'_>,
) -> Result<EvalReport, HarnessError> {
    let started = Instant::now();
    if tasks.is_empty() {
        return Err(MetricError::EmptyOutcomes.into());
    }
    let base = PipelineSettings::resolve(&[&options.file_settings, &options.cli_settings])?;
    let settings = tasks
        .iter()
        .enumerate()
        .map(|(index, t)| {
            options
                .settings_for(t)
                .map_err(|source| HarnessError::InvalidTaskConfig { index, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut docs = BTreeMap::new();
    for t in tasks {
        if !docs.contains_key(&t.doc) {
            docs.insert(t.doc.clone(), store.load(&t.doc)?);
        }
    }

    let mut pipelines = Vec::new();
    for &method in &options.methods {
        let outcomes = parallel_map(tasks, base.parallelism, |index, task| {
            let counter = CountingBackend::new(ctx.backend);
            let task_ctx = PipelineContext {
                backend: &counter,
                ..*ctx
            };
            let doc = &docs[&task.doc];
            let result = match method {
                Method::Pipeline => run_pipeline(doc, &task.keyword, &settings[index], &task_ctx),
                Method::Naive => run_naive(doc, &task.keyword, &settings[index], &task_ctx),
            };
            log::debug!("{method} task {index} finished");
            score(index, task, result, counter.calls(), &options.levels)
        });
        pipelines.push(summarize_outcomes(method.name(), outcomes, &options.levels)?);
    }
    let comparisons = pipelines
        .iter()
        .skip(1)
        .map(|other| Comparison::between(&pipelines[0], other))
        .collect();
    Ok(EvalReport {
        levels: options.levels.as_slice().to_vec(),
        pipelines,
        comparisons,
        wall_time: started.elapsed(),
    })
}
