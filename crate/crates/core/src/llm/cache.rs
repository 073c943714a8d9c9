use std::collections::{BTreeMap, HashMap};
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{BackendError, CompletionRequest, CompletionResponse, LlmBackend};

/// One line of the append-only cache file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub prompt: String,
    pub text: String,
    pub backend_id: String,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub file_bytes: u64,
    pub by_backend: BTreeMap<String, usize>,
}

/// Content-addressed completion cache persisted as JSONL.
pub struct ResponseCache {
    path: Option<PathBuf>,
    entries: RwLock<HashMap<String, CacheEntry>>,
    file: Mutex<Option<File>>,
}

impl ResponseCache {
    pub fn key(backend_id: &str, request: &CompletionRequest) -> String {
        let mut h = Sha256::new();
        h.update(backend_id.as_bytes());
        h.update([0]);
        h.update(request.prompt.as_bytes());
        h.update([0]);
        h.update(request.max_output_tokens.to_le_bytes());
        h.update(request.temperature.to_bits().to_le_bytes());
        hex::encode(h.finalize())
    }

    pub fn in_memory() -> Self {
        ResponseCache {
            path: None,
            entries: RwLock::new(HashMap::new()),
            file: Mutex::new(None),
        }
    }

    /// Loads existing entries (later lines win) and opens the file for appends.
    pub fn open(path: &Path) -> Result<Self, BackendError> {
        let storage = |e: &dyn std::fmt::Display| BackendError::Storage(format!("{}: {e}", path.display()));
        let mut entries = HashMap::new();
        if path.exists() {
            let text = fs::read_to_string(path).map_err(|e| storage(&e))?;
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let entry: CacheEntry = serde_json::from_str(line)
                    .map_err(|e| storage(&format!("line {}: {e}", i + 1)))?;
                entries.insert(entry.key.clone(), entry);
            }
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| storage(&e))?;
        Ok(ResponseCache {
            path: Some(path.to_path_buf()),
            entries: RwLock::new(entries),
            file: Mutex::new(Some(file)),
        })
    }

    pub fn get(&self, key: &str) -> Option<CacheEntry> {
        self.entries
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .get(key)
            .cloned()
    }

    pub fn insert(&self, entry: CacheEntry) -> Result<(), BackendError> {
        {
            let mut file = self.file.lock().unwrap_or_else(|p| p.into_inner());
            if let Some(f) = file.as_mut() {
                let mut line = serde_json::to_string(&entry).expect("cache entry serializes");
                line.push('\n');
                f.write_all(line.as_bytes())
                    .and_then(|_| f.flush())
                    .map_err(|e| BackendError::Storage(e.to_string()))?;
            }
        }
        self.entries
            .write()
            .unwrap_or_else(|p| p.into_inner())
            .insert(entry.key.clone(), entry);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap_or_else(|p| p.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stats(&self) -> CacheStats {
        let entries = self.entries.read().unwrap_or_else(|p| p.into_inner());
        let mut by_backend = BTreeMap::new();
        for e in entries.values() {
            *by_backend.entry(e.backend_id.clone()).or_insert(0) += 1;
        }
        let file_bytes = self
            .path
            .as_ref()
            .and_then(|p| fs::metadata(p).ok())
            .map_or(0, |m| m.len());
        CacheStats {
            entries: entries.len(),
            file_bytes,
            by_backend,
        }
    }

    /// Drops every entry and truncates the backing file.
    pub fn clear(&self) -> Result<(), BackendError> {
        let mut file = self.file.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(f) = file.as_mut() {
            f.set_len(0).map_err(|e| BackendError::Storage(e.to_string()))?;
        }
        self.entries.write().unwrap_or_else(|p| p.into_inner()).clear();
        Ok(())
    }
}

/// Serves repeated requests from a [`ResponseCache`]; misses go to `inner`
/// and are recorded.
pub struct CachedBackend<B> {
    inner: B,
    cache: ResponseCache,
}

impl<B: LlmBackend> CachedBackend<B> {
    pub fn new(inner: B, cache: ResponseCache) -> Self {
        CachedBackend { inner, cache }
    }

    pub fn cache(&self) -> &ResponseCache {
        &self.cache
    }
}

impl<B: LlmBackend> LlmBackend for CachedBackend<B> {
    fn backend_id(&self) -> &str {
        self.inner.backend_id()
    }

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        request.validate()?;
        let key = ResponseCache::key(self.inner.backend_id(), request);
        if let Some(hit) = self.cache.get(&key) {
            return Ok(CompletionResponse {
                text: hit.text,
                backend_id: hit.backend_id,
                cached: true,
            });
        }
        let response = self.inner.complete(request)?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        self.cache.insert(CacheEntry {
            key,
            prompt: request.prompt.clone(),
            text: response.text.clone(),
            backend_id: response.backend_id.clone(),
            timestamp,
        })?;
        Ok(response)
    }
}
