//! Segmentation: table serialization, splitting of overlong elements and
//! greedy merging of adjacent small pieces into token-budgeted segments.

mod serialize;
mod tokenizer;

use std::ops::Range;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::{Document, Element, Table};

pub use serialize::{serialize_table, SerializationFormat};
pub use tokenizer::{count_tokens, RunTokenizer, Tokenizer};

/// Separator placed between merged pieces. Counted against the budget.
pub const SEGMENT_JOINER: &str = "\n\n";

pub const MIN_SEGMENT_TOKENS: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SegmentError {
    #[error("document `{0}` has no content to segment")]
    EmptyDocument(String),
    #[error("max_tokens_per_segment must be at least {MIN_SEGMENT_TOKENS}, got {0}")]
    BudgetTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterConfig {
    pub max_tokens_per_segment: usize,
    pub format: SerializationFormat,
}

impl Default for SegmenterConfig {
    fn default() -> Self {
        SegmenterConfig {
            max_tokens_per_segment: 512,
            format: SerializationFormat::Plain,
        }
    }
}

impl SegmenterConfig {
    pub fn new(max_tokens_per_segment: usize, format: SerializationFormat) -> Result<Self, SegmentError> {
        let cfg = SegmenterConfig {
            max_tokens_per_segment,
            format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SegmentError> {
        if self.max_tokens_per_segment < MIN_SEGMENT_TOKENS {
            return Err(SegmentError::BudgetTooSmall(self.max_tokens_per_segment));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    /// Ordinal of this segment within its document.
    pub position: usize,
    pub doc_id: String,
    pub text: String,
    pub token_count: usize,
    /// Indices of the source elements, contiguous and ascending.
    pub source_indices: Vec<usize>,
}

/// Splits overlong text at sentence boundaries (". ", "! ", "? ", newline),
/// packing sentences greedily; sentences longer than the budget are cut at
/// token boundaries.
pub fn split_text(text: &str, budget: usize, tok: &dyn Tokenizer) -> Vec<String> {
    assert!(budget > 0, "token budget must be positive");
    if tok.count(text) <= budget {
        return vec![text.to_string()];
    }
    let mut pieces = Vec::new();
    let mut group: Option<Range<usize>> = None;
    for sentence in sentence_spans(text) {
        let n = tok.count(&text[sentence.clone()]);
        if n == 0 {
            continue;
        }
        if n > budget {
            if let Some(g) = group.take() {
                pieces.push(text[g].to_string());
            }
            pieces.extend(hard_split(&text[sentence], budget, tok));
            continue;
        }
        group = match group {
            Some(g) if tok.count(&text[g.start..sentence.end]) <= budget => {
                Some(g.start..sentence.end)
            }
            Some(g) => {
                pieces.push(text[g].to_string());
                Some(sentence)
            }
            None => Some(sentence),
        };
    }
    if let Some(g) = group {
        pieces.push(text[g].to_string());
    }
    pieces
}

/// Sentence byte ranges with surrounding whitespace trimmed.
fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let mut raw = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        let end = match c {
            '\n' => Some(i),
            '.' | '!' | '?' if matches!(chars.peek(), Some((_, ' '))) => Some(i + 1),
            _ => None,
        };
        if let Some(end) = end {
            raw.push(start..end);
            start = i + c.len_utf8();
        }
    }
    raw.push(start..text.len());
    raw.into_iter()
        .filter_map(|r| {
            let s = &text[r.clone()];
            let lead = s.len() - s.trim_start().len();
            let trimmed = s.trim();
            (!trimmed.is_empty()).then(|| r.start + lead..r.start + lead + trimmed.len())
        })
        .collect()
}

fn hard_split(text: &str, budget: usize, tok: &dyn Tokenizer) -> Vec<String> {
    tok.token_spans(text)
        .chunks(budget)
        .map(|chunk| text[chunk[0].start..chunk[chunk.len() - 1].end].to_string())
        .collect()
}

/// Splits a table at row boundaries. Header rows are repeated at the top of
/// every chunk when they take at most half the budget.
pub fn split_table(
    table: &Table,
    format: SerializationFormat,
    budget: usize,
    tok: &dyn Tokenizer,
) -> Vec<String> {
    let full = serialize_table(table, format);
    if tok.count(&full) <= budget {
        return vec![full];
    }
    let rows = table.row_count();
    let h = table.header_rows();
    let header: Vec<usize> = (0..h).collect();
    let repeat_header = h > 0
        && h < rows
        && tok.count(&serialize_table(&table.select_rows(&header), format)) <= budget / 2;
    let (base, body) = if repeat_header {
        (header, h..rows)
    } else {
        (Vec::new(), 0..rows)
    };

    let render = |group: &[usize]| {
        let mut idx = base.clone();
        idx.extend_from_slice(group);
        serialize_table(&table.select_rows(&idx), format)
    };

    let mut pieces = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for r in body {
        if !current.is_empty() {
            current.push(r);
            if tok.count(&render(&current)) <= budget {
                continue;
            }
            current.pop();
            pieces.push(render(&current));
            current.clear();
        }
        let single = render(&[r]);
        if tok.count(&single) <= budget {
            current.push(r);
        } else {
            pieces.extend(split_text(&single, budget, tok));
        }
    }
    if !current.is_empty() {
        pieces.push(render(&current));
    }
    pieces
}

fn join_pieces(a: &str, b: &str) -> String {
    if a.trim().is_empty() {
        b.to_string()
    } else if b.trim().is_empty() {
        a.to_string()
    } else {
        format!("{a}{SEGMENT_JOINER}{b}")
    }
}

/// Segments a document with the default tokenizer.
pub fn segment_document(doc: &Document, cfg: &SegmenterConfig) -> Result<Vec<Segment>, SegmentError> {
    segment_document_with(doc, cfg, &RunTokenizer)
}

pub fn segment_document_with(
    doc: &Document,
    cfg: &SegmenterConfig,
    tok: &dyn Tokenizer,
) -> Result<Vec<Segment>, SegmentError> {
    cfg.validate()?;
    if doc.elements.is_empty() {
        return Err(SegmentError::EmptyDocument(doc.id.clone()));
    }
    let budget = cfg.max_tokens_per_segment;

    let mut segments: Vec<Segment> = Vec::new();
    let mut current: Option<(Vec<usize>, String)> = None;
    for (index, element) in doc.elements.iter().enumerate() {
        let pieces = match element {
            Element::Text { text } => split_text(text, budget, tok),
            Element::Table(table) => split_table(table, cfg.format, budget, tok),
        };
        for piece in pieces {
            current = Some(match current.take() {
                None => (vec![index], piece),
                Some((mut indices, text)) => {
                    let merged = join_pieces(&text, &piece);
                    if tok.count(&merged) <= budget {
                        if indices.last() != Some(&index) {
                            indices.push(index);
                        }
                        (indices, merged)
                    } else {
                        push_segment(&mut segments, doc, indices, text, tok);
                        (vec![index], piece)
                    }
                }
            });
        }
    }
    if let Some((indices, text)) = current {
        push_segment(&mut segments, doc, indices, text, tok);
    }
    if segments.iter().all(|s| s.token_count == 0) {
        return Err(SegmentError::EmptyDocument(doc.id.clone()));
    }
    Ok(segments)
}

fn push_segment(
    out: &mut Vec<Segment>,
    doc: &Document,
    source_indices: Vec<usize>,
    text: String,
    tok: &dyn Tokenizer,
) {
    out.push(Segment {
        position: out.len(),
        doc_id: doc.id.clone(),
        token_count: tok.count(&text),
        text,
        source_indices,
    });
}

/// Serializes the whole document in order, tables rendered with `format`.
pub fn serialize_document(doc: &Document, format: SerializationFormat) -> String {
    doc.elements
        .iter()
        .map(|e| match e {
            Element::Text { text } => text.clone(),
            Element::Table(t) => serialize_table(t, format),
        })
        .filter(|s| !s.trim().is_empty())
        .collect::<Vec<_>>()
        .join(SEGMENT_JOINER)
}
