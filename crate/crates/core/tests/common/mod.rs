#![allow(dead_code)]

use std::path::PathBuf;

use hldx_core::config::SettingsOverride;
use hldx_core::eval::{load_tasks, BenchmarkOptions, DocumentStore, Method, RetaLevels, Task};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini-corpus")
}

/// The `pipeline` section of the corpus config file.
pub fn corpus_settings() -> SettingsOverride {
    let text = std::fs::read_to_string(corpus_dir().join("config.json")).expect("corpus config");
    let value: serde_json::Value = serde_json::from_str(&text).expect("config is JSON");
    serde_json::from_value(value["pipeline"].clone()).expect("pipeline section")
}

pub fn corpus_tasks() -> Vec<Task> {
    load_tasks(&corpus_dir().join("tasks.jsonl")).expect("corpus tasks")
}

pub fn corpus_store() -> DocumentStore {
    DocumentStore::Directory(corpus_dir().join("docs"))
}

pub fn corpus_options(methods: Vec<Method>) -> BenchmarkOptions {
    BenchmarkOptions {
        levels: RetaLevels::standard(),
        methods,
        file_settings: corpus_settings(),
        cli_settings: SettingsOverride::default(),
    }
}
