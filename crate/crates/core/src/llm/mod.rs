//! Completion backends: scripted fixtures and replay files for deterministic
//! runs, a live HTTP client, recording, and a persistent response cache.

mod cache;
mod http;
mod record;
mod scripted;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use cache::{CacheEntry, CacheStats, CachedBackend, ResponseCache};
pub use http::{HttpBackend, RetryPolicy, ENV_LLM_KEY, ENV_LLM_URL};
pub use record::RecordingBackend;
pub use scripted::{FixtureEntry, Matcher, ScriptedBackend, ScriptedFixture};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BackendError {
    #[error("no fixture matches prompt {hash} ({excerpt:?})")]
    NoFixtureMatch { hash: String, excerpt: String },
    #[error("transport failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("backend refused request: {0}")]
    Refused(String),
    #[error("storage error: {0}")]
    Storage(String),
    #[error("invalid completion request: {0}")]
    InvalidRequest(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub max_output_tokens: u32,
    pub temperature: f64,
}

impl CompletionRequest {
    pub const DEFAULT_MAX_OUTPUT_TOKENS: u32 = 512;

    pub fn new(prompt: impl Into<String>) -> Self {
        CompletionRequest {
            prompt: prompt.into(),
            max_output_tokens: Self::DEFAULT_MAX_OUTPUT_TOKENS,
            temperature: 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), BackendError> {
        if self.prompt.is_empty() {
            return Err(BackendError::InvalidRequest("prompt is empty".into()));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return Err(BackendError::InvalidRequest(format!(
                "temperature must be >= 0, got {}",
                self.temperature
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionResponse {
    pub text: String,
    pub backend_id: String,
    pub cached: bool,
}

/// A text-completion service. Implementations must tolerate concurrent calls.
pub trait LlmBackend: Send + Sync {
    fn backend_id(&self) -> &str;

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError>;
}

impl<T: LlmBackend + ?Sized> LlmBackend for &T {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        (**self).complete(request)
    }
}

impl<T: LlmBackend + ?Sized> LlmBackend for Box<T> {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        (**self).complete(request)
    }
}

impl<T: LlmBackend + ?Sized> LlmBackend for Arc<T> {
    fn backend_id(&self) -> &str {
        (**self).backend_id()
    }
    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        (**self).complete(request)
    }
}

/// Hex SHA-256 of the prompt text; the key used by hash matchers.
pub fn prompt_hash(prompt: &str) -> String {
    hex::encode(Sha256::digest(prompt.as_bytes()))
}

/// Counts calls that reach the wrapped backend.
pub struct CountingBackend<B> {
    inner: B,
    calls: AtomicU64,
}

impl<B: LlmBackend> CountingBackend<B> {
    pub fn new(inner: B) -> Self {
        CountingBackend {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn into_inner(self) -> B {
        self.inner
    }
}

impl<B: LlmBackend> LlmBackend for CountingBackend<B> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.complete(request)
    }
}
