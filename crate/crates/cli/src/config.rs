//! The JSON config file and construction of backends and embedders from it.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use hldx_core::config::SettingsOverride;
use hldx_core::llm::{
    CachedBackend, HttpBackend, LlmBackend, RecordingBackend, ResponseCache, RetryPolicy, ScriptedBackend,
    ENV_LLM_KEY, ENV_LLM_URL,
};
use hldx_core::retrieval::{Embedder, HttpEmbedder, TermFrequencyEmbedder};
use hldx_core::template::TemplatePack;
use serde::Deserialize;

use crate::error::CliError;

pub const ENV_CONFIG: &str = "HLDX_CONFIG";

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BackendSpec {
    /// Live endpoint; the URL falls back to `HLDX_LLM_URL`.
    Http {
        #[serde(default)]
        url: Option<String>,
        #[serde(default)]
        retry_base_delay_ms: Option<u64>,
    },
    /// Scripted fixture file (JSONL of matcher/response pairs).
    Replay { path: PathBuf },
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Http {
            url: None,
            retry_base_delay_ms: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum EmbedderSpec {
    #[default]
    Tf,
    Http {
        url: String,
        #[serde(default)]
        token: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(default)]
    pub pipeline: SettingsOverride,
    #[serde(default)]
    pub backend: BackendSpec,
    #[serde(default)]
    pub embedder: EmbedderSpec,
    #[serde(default)]
    pub cache_path: Option<PathBuf>,
    #[serde(default)]
    pub template_dir: Option<PathBuf>,
    #[serde(default)]
    pub record_path: Option<PathBuf>,
}

impl FileConfig {
    /// Loads `path`; relative paths inside are taken relative to its directory.
    pub fn load(path: &Path) -> Result<FileConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: FileConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("invalid config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let BackendSpec::Replay { path } = &mut cfg.backend {
            rebase(path);
        }
        for p in [&mut cfg.cache_path, &mut cfg.template_dir, &mut cfg.record_path]
            .into_iter()
            .flatten()
        {
            rebase(p);
        }
        Ok(cfg)
    }

    /// `--config` if given, else `HLDX_CONFIG`, else defaults.
    pub fn discover(explicit: Option<&Path>) -> Result<FileConfig, CliError> {
        match explicit {
            Some(p) => FileConfig::load(p),
            None => match std::env::var_os(ENV_CONFIG) {
                Some(p) if !p.is_empty() => FileConfig::load(Path::new(&p)),
                _ => Ok(FileConfig::default()),
            },
        }
    }
}

/// Command-line choices that override the file's backend section.
#[derive(Debug, Clone, Default)]
pub struct BackendFlags {
    pub replay: Option<PathBuf>,
    pub record: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub templates: Option<PathBuf>,
}

pub fn build_backend(cfg: &FileConfig, flags: &BackendFlags) -> Result<Box<dyn LlmBackend>, CliError> {
    let spec = match &flags.replay {
        Some(path) => BackendSpec::Replay { path: path.clone() },
        None => cfg.backend.clone(),
    };
    let mut backend: Box<dyn LlmBackend> = match spec {
        BackendSpec::Replay { path } => Box::new(ScriptedBackend::replay(&path).map_err(CliError::input)?),
        BackendSpec::Http {
            url,
            retry_base_delay_ms,
        } => {
            let url = url
                .or_else(|| std::env::var(ENV_LLM_URL).ok())
                .ok_or_else(|| CliError::input(format!("no backend configured: set {ENV_LLM_URL} or use --replay")))?;
            let mut http = HttpBackend::new(url, std::env::var(ENV_LLM_KEY).ok()).map_err(CliError::from)?;
            if let Some(ms) = retry_base_delay_ms {
                http = http.with_retry(RetryPolicy {
                    base_delay: Duration::from_millis(ms),
                    ..RetryPolicy::default()
                });
            }
            Box::new(http)
        }
    };
    if let Some(path) = flags.record.as_ref().or(cfg.record_path.as_ref()) {
        backend = Box::new(RecordingBackend::create(backend, path).map_err(CliError::input)?);
    }
    if let Some(path) = cache_path(cfg, flags) {
        let cache = ResponseCache::open(&path).map_err(CliError::input)?;
        backend = Box::new(CachedBackend::new(backend, cache));
    }
    Ok(backend)
}

pub fn cache_path(cfg: &FileConfig, flags: &BackendFlags) -> Option<PathBuf> {
    flags.cache.clone().or_else(|| cfg.cache_path.clone())
}

pub fn build_embedder(cfg: &FileConfig) -> Result<Box<dyn Embedder>, CliError> {
    Ok(match &cfg.embedder {
        EmbedderSpec::Tf => Box::new(TermFrequencyEmbedder),
        EmbedderSpec::Http { url, token } => {
            Box::new(HttpEmbedder::new(url.clone(), token.clone()).map_err(CliError::transport)?)
        }
    })
}

pub fn load_templates(cfg: &FileConfig, flags: &BackendFlags) -> Result<TemplatePack, CliError> {
    match flags.templates.as_ref().or(cfg.template_dir.as_ref()) {
        Some(dir) => TemplatePack::load_dir(dir).map_err(CliError::input),
        None => Ok(TemplatePack::default()),
    }
}
