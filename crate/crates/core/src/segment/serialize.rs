//! Table-to-text serialization in four formats.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::document::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SerializationFormat {
    /// Rows on separate lines, cells joined by `" | "`.
    #[default]
    Plain,
    Csv,
    Xml,
    Html,
}

impl SerializationFormat {
    pub const ALL: [SerializationFormat; 4] = [
        SerializationFormat::Plain,
        SerializationFormat::Csv,
        SerializationFormat::Xml,
        SerializationFormat::Html,
    ];
}

impl fmt::Display for SerializationFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SerializationFormat::Plain => "plain",
            SerializationFormat::Csv => "csv",
            SerializationFormat::Xml => "xml",
            SerializationFormat::Html => "html",
        })
    }
}

impl FromStr for SerializationFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plain" => Ok(SerializationFormat::Plain),
            "csv" => Ok(SerializationFormat::Csv),
            "xml" => Ok(SerializationFormat::Xml),
            "html" => Ok(SerializationFormat::Html),
            other => Err(format!("unknown serialization format `{other}`")),
        }
    }
}

pub fn serialize_table(table: &Table, format: SerializationFormat) -> String {
    let rows = table.cells();
    match format {
        SerializationFormat::Plain => rows
            .iter()
            .map(|r| r.join(" | "))
            .collect::<Vec<_>>()
            .join("\n"),
        SerializationFormat::Csv => rows
            .iter()
            .map(|r| r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("\n"),
        SerializationFormat::Xml => {
            let mut out = String::from("<table>");
            for row in rows {
                out.push_str("<row>");
                for cell in row {
                    out.push_str("<cell>");
                    out.push_str(&escape_markup(cell));
                    out.push_str("</cell>");
                }
                out.push_str("</row>");
            }
            out.push_str("</table>");
            out
        }
        SerializationFormat::Html => {
            let mut out = String::from("<table>");
            for (i, row) in rows.iter().enumerate() {
                let tag = if i < table.header_rows() { "th" } else { "td" };
                out.push_str("<tr>");
                for cell in row {
                    out.push_str(&format!("<{tag}>{}</{tag}>", escape_markup(cell)));
                }
                out.push_str("</tr>");
            }
            out.push_str("</table>");
            out
        }
    }
}

fn csv_field(cell: &str) -> String {
    if cell.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell.to_string()
    }
}

fn escape_markup(cell: &str) -> String {
    let mut out = String::with_capacity(cell.len());
    for c in cell.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            c => out.push(c),
        }
    }
    out
}
