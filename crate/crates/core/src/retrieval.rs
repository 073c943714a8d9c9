//! Embedding-based retrieval of the segments most similar to a keyword.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::segment::Segment;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RetrievalError {
    #[error("no segments to rank")]
    NoSegments,
    #[error("embedder unavailable: {0}")]
    EmbedderUnavailable(String),
    #[error("embeddings are not comparable: {0}")]
    IncompatibleEmbeddings(String),
    #[error("top_n must be at least 1")]
    InvalidTopN,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// Term → weight.
    Sparse(BTreeMap<String, f64>),
    Dense(Vec<f64>),
}

impl Embedding {
    pub fn norm(&self) -> f64 {
        self.squared_norm().sqrt()
    }

    fn squared_norm(&self) -> f64 {
        match self {
            Embedding::Sparse(m) => m.values().map(|w| w * w).sum(),
            Embedding::Dense(v) => v.iter().map(|w| w * w).sum(),
        }
    }

    /// Multiplies every weight by `c`.
    pub fn scaled(&self, c: f64) -> Embedding {
        match self {
            Embedding::Sparse(m) => {
                Embedding::Sparse(m.iter().map(|(k, w)| (k.clone(), w * c)).collect())
            }
            Embedding::Dense(v) => Embedding::Dense(v.iter().map(|w| w * c).collect()),
        }
    }

    fn dot(&self, other: &Embedding) -> Result<f64, RetrievalError> {
        match (self, other) {
            (Embedding::Sparse(a), Embedding::Sparse(b)) => {
                let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
                Ok(small
                    .iter()
                    .filter_map(|(k, w)| large.get(k).map(|v| w * v))
                    .sum())
            }
            (Embedding::Dense(a), Embedding::Dense(b)) if a.len() == b.len() => {
                Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
            }
            (Embedding::Dense(a), Embedding::Dense(b)) => Err(
                RetrievalError::IncompatibleEmbeddings(format!("dimensions {} vs {}", a.len(), b.len())),
            ),
            _ => Err(RetrievalError::IncompatibleEmbeddings(
                "sparse vs dense".into(),
            )),
        }
    }

    /// Cosine similarity; 0 when either vector has zero norm.
    ///
    /// Computed as `sign(d) * sqrt(d² / (|a|²|b|²))` so that equal rational
    /// cosines over integer weights round to the same float, which keeps
    /// ties exact for the term-frequency embedder.
    pub fn cosine(&self, other: &Embedding) -> Result<f64, RetrievalError> {
        let dot = self.dot(other)?;
        let denom = self.squared_norm() * other.squared_norm();
        if denom == 0.0 || dot == 0.0 {
            return Ok(0.0);
        }
        let c = (dot * dot / denom).sqrt().min(1.0);
        Ok(if dot < 0.0 { -c } else { c })
    }
}

/// Turns text into embeddings. Must be deterministic per (embedder, text).
pub trait Embedder: Send + Sync {
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Embedding>, RetrievalError>;

    fn embed(&self, text: &str) -> Result<Embedding, RetrievalError> {
        Ok(self.embed_batch(&[text])?.remove(0))
    }
}

/// Exact lowercase term frequencies over alphanumeric runs.
#[derive(Debug, Clone, Copy, Default)]
pub struct TermFrequencyEmbedder;

impl TermFrequencyEmbedder {
    pub fn embed_text(&self, text: &str) -> Embedding {
        let mut tf = BTreeMap::new();
        for term in text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            *tf.entry(term.to_lowercase()).or_insert(0.0) += 1.0;
        }
        Embedding::Sparse(tf)
    }
}

impl Embedder for TermFrequencyEmbedder {
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Embedding>, RetrievalError> {
        Ok(texts.iter().map(|t| self.embed_text(t)).collect())
    }
}

/// Remote dense embedder: POST `{"texts": [...]}` → `{"vectors": [[...]]}`.
pub struct HttpEmbedder {
    url: String,
    token: Option<String>,
    client: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct EmbedResponse {
    vectors: Vec<Vec<f64>>,
}

impl HttpEmbedder {
    pub fn new(url: impl Into<String>, token: Option<String>) -> Result<Self, RetrievalError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| RetrievalError::EmbedderUnavailable(e.to_string()))?;
        Ok(HttpEmbedder {
            url: url.into(),
            token,
            client,
        })
    }
}

impl Embedder for HttpEmbedder {
    fn embed_batch(&self, texts: &[&str]) -> Result<Vec<Embedding>, RetrievalError> {
        let unavailable = |e: &dyn std::fmt::Display| RetrievalError::EmbedderUnavailable(e.to_string());
        let mut req = self.client.post(&self.url).json(&EmbedRequest { texts });
        if let Some(token) = &self.token {
            req = req.bearer_auth(token);
        }
        let resp = req.send().map_err(|e| unavailable(&e))?;
        if !resp.status().is_success() {
            return Err(unavailable(&format!("HTTP {}", resp.status())));
        }
        let body: EmbedResponse = resp.json().map_err(|e| unavailable(&e))?;
        if body.vectors.len() != texts.len() {
            return Err(unavailable(&format!(
                "expected {} vectors, got {}",
                texts.len(),
                body.vectors.len()
            )));
        }
        Ok(body.vectors.into_iter().map(Embedding::Dense).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetrievalConfig {
    pub top_n: usize,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        RetrievalConfig { top_n: 3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSegment<'a> {
    pub segment: &'a Segment,
    pub score: f64,
}

/// Ranks segments by cosine similarity to `keyword`, highest first; ties go
/// to the segment that comes earlier in the document.
pub fn top_segments<'a>(
    embedder: &dyn Embedder,
    keyword: &str,
    segments: &'a [Segment],
    cfg: &RetrievalConfig,
) -> Result<Vec<ScoredSegment<'a>>, RetrievalError> {
    if segments.is_empty() {
        return Err(RetrievalError::NoSegments);
    }
    if cfg.top_n == 0 {
        return Err(RetrievalError::InvalidTopN);
    }
    let query = embedder.embed(keyword)?;
    let texts: Vec<&str> = segments.iter().map(|s| s.text.as_str()).collect();
    let vectors = embedder.embed_batch(&texts)?;
    let scores = vectors
        .iter()
        .map(|v| query.cosine(v))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(rank(segments, &scores, cfg.top_n))
}

/// Orders precomputed scores, applying the position tie-break.
pub fn rank<'a>(segments: &'a [Segment], scores: &[f64], top_n: usize) -> Vec<ScoredSegment<'a>> {
    let mut scored: Vec<ScoredSegment<'a>> = segments
        .iter()
        .zip(scores)
        .map(|(segment, &score)| ScoredSegment { segment, score })
        .collect();
    scored.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then(a.segment.position.cmp(&b.segment.position))
    });
    scored.truncate(top_n);
    scored
}
