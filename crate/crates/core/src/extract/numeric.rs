//! Normalization of answer strings like "($1,234.5) million" to magnitudes.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::document::Scale;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericError {
    #[error("no numeric value in {0:?}")]
    NotANumber(String),
    #[error("{count} numeric values in {raw:?}; expected exactly one")]
    AmbiguousNumber { raw: String, count: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedValue {
    pub magnitude: f64,
    pub scale_applied: Scale,
    pub is_percent: bool,
    pub raw: String,
}

const CURRENCY: [char; 3] = ['$', '€', '£'];
const MINUS: [char; 2] = ['-', '\u{2212}'];

fn literal_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"(?:(?:\d{1,3}(?:,\d{3})+|\d+)(?:\.\d+)?|\.\d+)(?:[eE][+-]?\d+)?")
            .expect("valid literal pattern")
    })
}

/// A numeric literal found in the raw text, as a byte range.
struct Literal {
    start: usize,
    end: usize,
}

/// Literals not glued to letters or digits on either side ("FY2022" has none).
fn literals(raw: &str) -> Vec<Literal> {
    literal_re()
        .find_iter(raw)
        .filter(|m| {
            let before = raw[..m.start()].chars().next_back();
            let after = raw[m.end()..].chars().next();
            !before.is_some_and(char::is_alphanumeric) && !after.is_some_and(char::is_alphanumeric)
        })
        .map(|m| Literal {
            start: m.start(),
            end: m.end(),
        })
        .collect()
}

/// Scale word directly after the literal (whitespace allowed) and the byte
/// offset just past it.
fn scale_word_after(raw: &str, end: usize) -> Option<(Scale, usize)> {
    let rest = &raw[end..];
    let trimmed = rest.trim_start();
    let offset = end + (rest.len() - trimmed.len());
    let word_len = trimmed
        .find(|c: char| !c.is_alphabetic())
        .unwrap_or(trimmed.len());
    let scale = Scale::from_word(&trimmed[..word_len]).filter(|s| *s != Scale::Unit)?;
    Some((scale, offset + word_len))
}

fn is_parenthesized(raw: &str, lit: &Literal, after_scale: usize) -> bool {
    let before = raw[..lit.start]
        .trim_end_matches(|c: char| c.is_whitespace() || CURRENCY.contains(&c));
    let after = raw[after_scale..].trim_start_matches(|c: char| c.is_whitespace() || c == '%');
    before.ends_with('(') && after.starts_with(')')
}

fn is_minus_signed(raw: &str, lit: &Literal) -> bool {
    let before = raw[..lit.start].trim_end_matches(|c: char| CURRENCY.contains(&c));
    let mut rev = before.chars().rev();
    match rev.next() {
        Some(c) if MINUS.contains(&c) => !rev.next().is_some_and(char::is_alphanumeric),
        _ => false,
    }
}

/// Parses a single numeric answer. An inline scale word wins over the
/// document's scale hint; percentages keep their face value and ignore the hint.
pub fn normalize_numeric(raw: &str, doc_scale_hint: Option<Scale>) -> Result<NormalizedValue, NumericError> {
    let not_a_number = || NumericError::NotANumber(raw.to_string());
    if !raw.chars().any(|c| c.is_ascii_digit()) {
        return Err(not_a_number());
    }
    let found = literals(raw);
    let lit = match found.as_slice() {
        [] => return Err(not_a_number()),
        [one] => one,
        many => {
            return Err(NumericError::AmbiguousNumber {
                raw: raw.to_string(),
                count: many.len(),
            })
        }
    };
    let is_percent = raw.contains('%');
    let inline = scale_word_after(raw, lit.end);
    let after_scale = inline.map_or(lit.end, |(_, end)| end);
    let scale = match (inline, doc_scale_hint) {
        (Some((s, _)), _) => s,
        (None, Some(hint)) if !is_percent => hint,
        _ => Scale::Unit,
    };
    let negative = is_parenthesized(raw, lit, after_scale) || is_minus_signed(raw, lit);

    let text: String = raw[lit.start..lit.end].chars().filter(|&c| c != ',').collect();
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (
            &text[..i],
            text[i + 1..].parse::<i64>().map_err(|_| not_a_number())?,
        ),
        None => (text.as_str(), 0),
    };
    // one decimal parse so the scale shift is exact
    let magnitude: f64 = format!("{mantissa}e{}", exponent + i64::from(scale.exponent()))
        .parse()
        .map_err(|_| not_a_number())?;
    if !magnitude.is_finite() {
        return Err(not_a_number());
    }
    Ok(NormalizedValue {
        magnitude: if negative { -magnitude } else { magnitude },
        scale_applied: scale,
        is_percent,
        raw: raw.to_string(),
    })
}
