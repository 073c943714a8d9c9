//! Hybrid document model: ordered text and table elements plus metadata.
//!
//! Documents arrive either in the canonical JSON form or as minimal HTML
//! (tables plus block-level text). Both parsers produce rectangular tables.

use scraper::{ElementRef, Html, Node};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DocumentError {
    #[error("malformed document: {0}")]
    MalformedInput(String),
}

/// Magnitude multiplier stated for a document or a value ("in millions").
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Unit,
    Thousand,
    Million,
    Billion,
}

impl Scale {
    pub fn multiplier(self) -> f64 {
        10f64.powi(self.exponent())
    }

    /// Power of ten applied by this scale.
    pub fn exponent(self) -> i32 {
        match self {
            Scale::Unit => 0,
            Scale::Thousand => 3,
            Scale::Million => 6,
            Scale::Billion => 9,
        }
    }

    /// Parses a scale word such as "million" or "Millions".
    pub fn from_word(word: &str) -> Option<Scale> {
        let lower = word.to_ascii_lowercase();
        let stem = lower.strip_suffix('s').unwrap_or(&lower);
        match stem {
            "unit" => Some(Scale::Unit),
            "thousand" => Some(Scale::Thousand),
            "million" => Some(Scale::Million),
            "billion" => Some(Scale::Billion),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub company: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_hint: Option<Scale>,
}

/// Rectangular grid of cells; the first `header_rows` rows are headers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Table {
    header_rows: usize,
    cells: Vec<Vec<String>>,
}

impl Table {
    /// Builds a table, right-padding ragged rows with empty cells.
    pub fn new(cells: Vec<Vec<String>>, header_rows: usize) -> Result<Table, DocumentError> {
        let width = cells.iter().map(Vec::len).max().unwrap_or(0);
        if cells.is_empty() || width == 0 {
            return Err(DocumentError::MalformedInput(
                "table must have at least one row and one column".into(),
            ));
        }
        if header_rows > cells.len() {
            return Err(DocumentError::MalformedInput(format!(
                "header_rows {} exceeds row count {}",
                header_rows,
                cells.len()
            )));
        }
        let cells = cells
            .into_iter()
            .map(|mut row| {
                row.resize(width, String::new());
                row
            })
            .collect();
        Ok(Table { header_rows, cells })
    }

    pub fn cells(&self) -> &[Vec<String>] {
        &self.cells
    }

    pub fn header_rows(&self) -> usize {
        self.header_rows
    }

    pub fn row_count(&self) -> usize {
        self.cells.len()
    }

    pub fn column_count(&self) -> usize {
        self.cells[0].len()
    }

    /// Sub-table made of the given rows (ascending); header status is kept per row.
    pub(crate) fn select_rows(&self, rows: &[usize]) -> Table {
        Table {
            header_rows: rows.iter().filter(|&&r| r < self.header_rows).count(),
            cells: rows.iter().map(|&r| self.cells[r].clone()).collect(),
        }
    }
}

#[derive(Deserialize)]
struct RawTable {
    #[serde(default)]
    header_rows: usize,
    cells: Vec<Vec<String>>,
}

impl<'de> Deserialize<'de> for Table {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawTable::deserialize(de)?;
        Table::new(raw.cells, raw.header_rows).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Element {
    Text { text: String },
    Table(Table),
}

impl Element {
    pub fn text(text: impl Into<String>) -> Element {
        Element::Text { text: text.into() }
    }

    pub fn is_table(&self) -> bool {
        matches!(self, Element::Table(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub metadata: DocMetadata,
    pub elements: Vec<Element>,
}

impl Document {
    pub fn new(
        id: impl Into<String>,
        metadata: DocMetadata,
        elements: Vec<Element>,
    ) -> Result<Document, DocumentError> {
        let id = id.into();
        if id.is_empty() {
            return Err(DocumentError::MalformedInput("document id is empty".into()));
        }
        Ok(Document {
            id,
            metadata,
            elements,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("document serialization is infallible")
    }
}

/// Parses a document from the canonical JSON format.
pub fn parse_json_doc(bytes: &[u8]) -> Result<Document, DocumentError> {
    let doc: Document =
        serde_json::from_slice(bytes).map_err(|e| DocumentError::MalformedInput(e.to_string()))?;
    if doc.id.is_empty() {
        return Err(DocumentError::MalformedInput("document id is empty".into()));
    }
    Ok(doc)
}

const BLOCK_TAGS: &[&str] = &[
    "p", "div", "section", "article", "header", "footer", "main", "aside", "nav", "h1", "h2",
    "h3", "h4", "h5", "h6", "li", "ul", "ol", "dl", "dt", "dd", "blockquote", "pre", "br", "hr",
    "figure", "figcaption", "caption", "address", "center",
];

const SKIPPED_TAGS: &[&str] = &["script", "style", "head", "noscript", "template"];

/// Parses minimal HTML: each `<table>` becomes a table element and block-level
/// text between tables becomes text elements with whitespace collapsed.
pub fn parse_html_doc(
    bytes: &[u8],
    id: &str,
    metadata: DocMetadata,
) -> Result<Document, DocumentError> {
    let source = std::str::from_utf8(bytes)
        .map_err(|e| DocumentError::MalformedInput(format!("HTML is not UTF-8: {e}")))?;
    let html = Html::parse_document(source);
    let mut walker = HtmlWalker::default();
    walker.visit(html.root_element());
    walker.flush_text();
    Document::new(id, metadata, walker.elements)
}

#[derive(Default)]
struct HtmlWalker {
    elements: Vec<Element>,
    text: String,
}

impl HtmlWalker {
    fn visit(&mut self, el: ElementRef<'_>) {
        for child in el.children() {
            match child.value() {
                Node::Text(t) => self.text.push_str(t),
                Node::Element(e) => {
                    let name = e.name();
                    if SKIPPED_TAGS.contains(&name) {
                        continue;
                    }
                    let child_el = ElementRef::wrap(child).expect("element node");
                    if name == "table" {
                        self.flush_text();
                        if let Some(table) = html_table(child_el) {
                            self.elements.push(Element::Table(table));
                        }
                    } else if BLOCK_TAGS.contains(&name) {
                        self.flush_text();
                        self.visit(child_el);
                        self.flush_text();
                    } else {
                        self.visit(child_el);
                    }
                }
                _ => {}
            }
        }
    }

    fn flush_text(&mut self) {
        let collapsed = collapse_whitespace(&self.text);
        self.text.clear();
        if !collapsed.is_empty() {
            self.elements.push(Element::Text { text: collapsed });
        }
    }
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn html_table(table: ElementRef<'_>) -> Option<Table> {
    let mut rows: Vec<(Vec<String>, bool)> = Vec::new();
    collect_rows(table, &mut rows);
    if rows.is_empty() {
        // a <table> with no rows still counts as one element
        return Table::new(vec![vec![String::new()]], 0).ok();
    }
    let header_rows = rows.iter().take_while(|(_, all_th)| *all_th).count();
    let cells = rows
        .into_iter()
        .map(|(mut row, _)| {
            if row.is_empty() {
                row.push(String::new());
            }
            row
        })
        .collect();
    Table::new(cells, header_rows).ok()
}

/// Collects `<tr>` rows of this table, not descending into nested tables.
fn collect_rows(el: ElementRef<'_>, rows: &mut Vec<(Vec<String>, bool)>) {
    for child in el.children().filter_map(ElementRef::wrap) {
        match child.value().name() {
            "tr" => {
                let mut cells = Vec::new();
                let mut all_th = true;
                for cell in child.children().filter_map(ElementRef::wrap) {
                    let name = cell.value().name();
                    if name == "td" || name == "th" {
                        all_th &= name == "th";
                        cells.push(collapse_whitespace(&cell.text().collect::<String>()));
                    }
                }
                let all_th = all_th && !cells.is_empty();
                rows.push((cells, all_th));
            }
            "table" => {}
            _ => collect_rows(child, rows),
        }
    }
}
