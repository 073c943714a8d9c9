use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{prompt_hash, BackendError, CompletionRequest, CompletionResponse, LlmBackend};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum Matcher {
    /// Hex SHA-256 of the exact prompt.
    Hash(String),
    Substring(String),
}

impl Matcher {
    pub fn matches(&self, prompt: &str, hash: &str) -> bool {
        match self {
            Matcher::Hash(h) => h.eq_ignore_ascii_case(hash),
            Matcher::Substring(s) => prompt.contains(s.as_str()),
        }
    }
}

/// One line of a fixture/replay file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    #[serde(rename = "match")]
    pub matcher: Matcher,
    pub response: String,
}

/// Ordered matcher list; the first match wins.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptedFixture {
    pub entries: Vec<FixtureEntry>,
}

impl ScriptedFixture {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn substring(mut self, pattern: impl Into<String>, response: impl Into<String>) -> Self {
        self.entries.push(FixtureEntry {
            matcher: Matcher::Substring(pattern.into()),
            response: response.into(),
        });
        self
    }

    pub fn exact(mut self, prompt: &str, response: impl Into<String>) -> Self {
        self.entries.push(FixtureEntry {
            matcher: Matcher::Hash(prompt_hash(prompt)),
            response: response.into(),
        });
        self
    }

    pub fn lookup(&self, prompt: &str) -> Option<&str> {
        let hash = prompt_hash(prompt);
        self.entries
            .iter()
            .find(|e| e.matcher.matches(prompt, &hash))
            .map(|e| e.response.as_str())
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, BackendError> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let entry: FixtureEntry = serde_json::from_str(line)
                .map_err(|e| BackendError::Storage(format!("fixture line {}: {e}", i + 1)))?;
            entries.push(entry);
        }
        Ok(ScriptedFixture { entries })
    }

    pub fn load(path: &Path) -> Result<Self, BackendError> {
        let text = fs::read_to_string(path)
            .map_err(|e| BackendError::Storage(format!("{}: {e}", path.display())))?;
        Self::parse_jsonl(&text)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            out.push_str(&serde_json::to_string(e).expect("fixture entry serializes"));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), BackendError> {
        let mut f = fs::File::create(path)
            .map_err(|e| BackendError::Storage(format!("{}: {e}", path.display())))?;
        f.write_all(self.to_jsonl().as_bytes())
            .map_err(|e| BackendError::Storage(format!("{}: {e}", path.display())))
    }
}

/// Answers from a fixture; a pure function of (fixture, request).
#[derive(Debug, Clone)]
pub struct ScriptedBackend {
    id: String,
    fixture: ScriptedFixture,
}

impl ScriptedBackend {
    pub fn new(fixture: ScriptedFixture) -> Self {
        Self::with_id("scripted", fixture)
    }

    /// Backend over a recorded replay file.
    pub fn replay(path: &Path) -> Result<Self, BackendError> {
        Ok(Self::with_id("replay", ScriptedFixture::load(path)?))
    }

    pub fn with_id(id: impl Into<String>, fixture: ScriptedFixture) -> Self {
        ScriptedBackend {
            id: id.into(),
            fixture,
        }
    }

    pub fn fixture(&self) -> &ScriptedFixture {
        &self.fixture
    }
}

impl LlmBackend for ScriptedBackend {
    fn backend_id(&self) -> &str {
        &self.id
    }

    fn complete(&self, request: &CompletionRequest) -> Result<CompletionResponse, BackendError> {
        request.validate()?;
        match self.fixture.lookup(&request.prompt) {
            Some(text) => Ok(CompletionResponse {
                text: text.to_string(),
                backend_id: self.id.clone(),
                cached: false,
            }),
            None => Err(BackendError::NoFixtureMatch {
                hash: prompt_hash(&request.prompt),
                excerpt: request.prompt.chars().take(80).collect(),
            }),
        }
    }
}
