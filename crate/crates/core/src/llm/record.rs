use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::{prompt_hash, BackendError, CompletionRequest, CompletionResponse, FixtureEntry, LlmBackend, Matcher};

/// Forwards to a live backend and appends every exchange to a replay file
/// that [`super::ScriptedBackend::replay`] can serve later.
pub struct RecordingBackend<B> {
    inner: B,
    path: PathBuf,
    file: Mutex<File>,
}

impl<B: LlmBackend> RecordingBackend<B> {
    /// Creates (or truncates) the replay file up front so an unwritable path
    /// fails before any call is made.
    pub fn create(inner: B, path: &Path) -> Result<Self, BackendError> {
        let file = File::create(path)
            .map_err(|e| BackendError::Storage(format!("{}: {e}", path.display())))?;
        Ok(RecordingBackend {
            inner,
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl<B: LlmBackend> LlmBackend for RecordingBackend<B> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        let response = self.inner.complete(request)?;
        let entry = FixtureEntry {
            matcher: Matcher::Hash(prompt_hash(&request.prompt)),
            response: response.text.clone(),
        };
        let mut line = serde_json::to_string(&entry).expect("fixture entry serializes");
        line.push('\n');
        let mut file = self.file.lock().unwrap_or_else(|p| p.into_inner());
        file.write_all(line.as_bytes())
            .and_then(|_| file.flush())
            .map_err(|e| BackendError::Storage(format!("{}: {e}", self.path.display())))?;
        Ok(response)
    }
}
