use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{BackendError, CompletionRequest, CompletionResponse, LlmBackend};

pub const ENV_LLM_URL: &str = "HLDX_LLM_URL";
pub const ENV_LLM_KEY: &str = "HLDX_LLM_KEY";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RetryPolicy {
    pub attempts: u32,
    /// Delay after the first failure; doubles after each further failure.
    pub base_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            attempts: 3,
            base_delay: Duration::from_secs(1),
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    prompt: &'a str,
    max_tokens: u32,
    temperature: f64,
}

#[derive(Deserialize)]
struct WireResponse {
    text: String,
}

/// Live completion endpoint: POST `{"prompt","max_tokens","temperature"}` →
/// `{"text"}`.
pub struct HttpBackend {
    url: String,
    api_key: Option<String>,
    retry: RetryPolicy,
    client: reqwest::blocking::Client,
}

enum Failure {
    Retryable(String),
    Fatal(BackendError),
}

impl HttpBackend {
    pub fn new(url: impl Into<String>, api_key: Option<String>) -> Result<Self, BackendError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(120))
            .build()
            .map_err(|e| BackendError::Transport {
                attempts: 0,
                message: e.to_string(),
            })?;
        Ok(HttpBackend {
            url: url.into(),
            api_key,
            retry: RetryPolicy::default(),
            client,
        })
    }

    /// Reads `HLDX_LLM_URL` and the optional `HLDX_LLM_KEY`.
    pub fn from_env() -> Result<Self, BackendError> {
        let url = std::env::var(ENV_LLM_URL)
            .map_err(|_| BackendError::InvalidRequest(format!("{ENV_LLM_URL} is not set")))?;
        Self::new(url, std::env::var(ENV_LLM_KEY).ok())
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    fn attempt(&self, request: &CompletionRequest) -> Result<String, Failure> {
        let body = WireRequest {
            prompt: &request.prompt,
            max_tokens: request.max_output_tokens,
            temperature: request.temperature,
        };
        let mut req = self.client.post(&self.url).json(&body);
        if let Some(key) = &self.api_key {
            req = req.bearer_auth(key);
        }
        let resp = req.send().map_err(|e| Failure::Retryable(e.to_string()))?;
        let status = resp.status();
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Failure::Retryable(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let detail = resp.text().unwrap_or_default();
            return Err(Failure::Fatal(BackendError::Refused(format!(
                "HTTP {status}: {}",
                detail.trim()
            ))));
        }
        let wire: WireResponse = resp
            .json()
            .map_err(|e| Failure::Fatal(BackendError::Refused(format!("bad response body: {e}"))))?;
        Ok(wire.text)
    }
}

impl LlmBackend for HttpBackend {
    fn backend_id(&self) -> &str {
        "http"
    }

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        request.validate()?;
        let attempts = self.retry.attempts.max(1);
        let mut delay = self.retry.base_delay;
        let mut last = String::new();
        for attempt in 1..=attempts {
            match self.attempt(request) {
                Ok(text) => {
                    return Ok(CompletionResponse {
                        text,
                        backend_id: self.backend_id().to_string(),
                        cached: false,
                    })
                }
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retryable(msg)) => {
                    log::warn!("completion attempt {attempt}/{attempts} failed: {msg}");
                    last = msg;
                    if attempt < attempts {
                        thread::sleep(delay);
                        delay *= 2;
                    }
                }
            }
        }
        Err(BackendError::Transport {
            attempts,
            message: last,
        })
    }
}
