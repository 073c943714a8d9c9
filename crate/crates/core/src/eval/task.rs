//! Task files: JSONL, one extraction task per line.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SettingsOverride;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaskError {
    #[error("cannot read task file {path}: {message}")]
    Io { path: String, message: String },
    #[error("task file line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Ground truth: a scale-resolved number, or a string compared after
/// case and whitespace folding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Truth {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    /// Document id or path, resolved against the document store.
    pub doc: String,
    pub keyword: String,
    pub truth: Truth,
    #[serde(default, skip_serializing_if = "SettingsOverride::is_empty")]
    pub config: SettingsOverride,
}

pub fn parse_tasks(text: &str) -> Result<Vec<Task>, TaskError> {
    let mut tasks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| TaskError::Malformed { line: i + 1, message };
        let task: Task = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        if task.keyword.trim().is_empty() {
            return Err(malformed("keyword is empty".into()));
        }
        if task.doc.trim().is_empty() {
            return Err(malformed("doc is empty".into()));
        }
        tasks.push(task);
    }
    Ok(tasks)
}

pub fn load_tasks(path: &Path) -> Result<Vec<Task>, TaskError> {
    let text = fs::read_to_string(path).map_err(|e| TaskError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_tasks(&text)
}

pub fn to_jsonl(tasks: &[Task]) -> String {
    tasks
        .iter()
        .map(|t| serde_json::to_string(t).expect("task serializes") + "\n")
        .collect()
}

/// Lowercase with runs of whitespace collapsed to one space.
pub fn fold_text(s: &str) -> String {
    s.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}
