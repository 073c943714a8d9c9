//! Shared inputs for the benchmarks.

use std::path::{Path, PathBuf};

use hldx_core::document::{DocMetadata, Document, Element, Scale, Table};
use hldx_core::eval::load_document;

pub fn corpus_doc(id: &str) -> Document {
    let path: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("../../fixtures/mini-corpus/docs/{id}.json"));
    load_document(&path).expect("corpus document")
}

/// A document of `sections` prose paragraphs, each followed by a 12-row table.
pub fn synthetic_doc(sections: usize) -> Document {
    let mut elements = Vec::new();
    for s in 0..sections {
        let words: Vec<String> = (0..120).map(|i| format!("word{}", (i * 7 + s) % 53)).collect();
        elements.push(Element::text(words.join(" ") + "."));
        let mut cells = vec![vec!["Item".to_string(), "2023".to_string(), "2022".to_string()]];
        for r in 0..12 {
            cells.push(vec![
                format!("Line item {s}-{r}"),
                format!("{}.{}", 100 + r * s, r),
                format!("({},{:03})", 1 + r, s % 1000),
            ]);
        }
        elements.push(Element::Table(Table::new(cells, 1).expect("rectangular table")));
    }
    let metadata = DocMetadata {
        company: Some("Bench Co".into()),
        time: Some("FY2023".into()),
        scale_hint: Some(Scale::Million),
    };
    Document::new("bench", metadata, elements).expect("valid document")
}
