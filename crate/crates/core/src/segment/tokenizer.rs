//! Deterministic token counting.

use std::ops::Range;

/// Counts and locates tokens in text.
///
/// Budgets throughout segmentation are expressed in this tokenizer's units.
pub trait Tokenizer: Send + Sync {
    /// Byte ranges of each token, in order.
    fn token_spans(&self, text: &str) -> Vec<Range<usize>>;

    fn count(&self, text: &str) -> usize {
        self.token_spans(text).len()
    }
}

/// A token is a maximal run of alphanumeric characters or a single
/// non-alphanumeric, non-whitespace character. Whitespace yields nothing.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunTokenizer;

impl Tokenizer for RunTokenizer {
    fn token_spans(&self, text: &str) -> Vec<Range<usize>> {
        let mut spans = Vec::new();
        let mut run_start: Option<usize> = None;
        for (i, c) in text.char_indices() {
            if c.is_alphanumeric() {
                run_start.get_or_insert(i);
                continue;
            }
            if let Some(start) = run_start.take() {
                spans.push(start..i);
            }
            if !c.is_whitespace() {
                spans.push(i..i + c.len_utf8());
            }
        }
        if let Some(start) = run_start {
            spans.push(start..text.len());
        }
        spans
    }

    fn count(&self, text: &str) -> usize {
        let mut n = 0;
        let mut in_run = false;
        for c in text.chars() {
            if c.is_alphanumeric() {
                if !in_run {
                    n += 1;
                    in_run = true;
                }
            } else {
                in_run = false;
                if !c.is_whitespace() {
                    n += 1;
                }
            }
        }
        n
    }
}

/// Token count under the default tokenizer.
pub fn count_tokens(text: &str) -> usize {
    RunTokenizer.count(text)
}
