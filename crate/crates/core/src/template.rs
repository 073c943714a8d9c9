//! Prompt template pack: plain-text files with `{placeholder}` substitution.

use std::fs;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemplateError {
    #[error("cannot read template {file}: {message}")]
    Io { file: String, message: String },
    #[error("template {file} is missing placeholder {{{placeholder}}}")]
    MissingPlaceholder { file: String, placeholder: String },
}

/// Every placeholder name any template may use.
pub const PLACEHOLDERS: &[&str] = &[
    "keyword",
    "summary",
    "segment",
    "current_summary",
    "map_outputs",
    "shot_input",
    "shot_output",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplatePack {
    pub extract_base: String,
    pub precision_clause: String,
    pub shot_plain: String,
    pub shot_precision: String,
    pub refine_init: String,
    pub refine_step: String,
    pub map: String,
    pub reduce: String,
}

const FILES: [(&str, &[&str]); 8] = [
    ("extract_base.txt", &["keyword", "summary"]),
    ("precision_clause.txt", &[]),
    ("shot_plain.txt", &["shot_input", "shot_output"]),
    ("shot_precision.txt", &["shot_input", "shot_output"]),
    ("refine_init.txt", &["keyword", "segment"]),
    ("refine_step.txt", &["keyword", "current_summary", "segment"]),
    ("map.txt", &["keyword", "segment"]),
    ("reduce.txt", &["keyword", "map_outputs"]),
];

impl Default for TemplatePack {
    fn default() -> Self {
        let t = |s: &str| s.trim_end_matches('\n').to_string();
        TemplatePack {
            extract_base: t(include_str!("../templates/extract_base.txt")),
            precision_clause: t(include_str!("../templates/precision_clause.txt")),
            shot_plain: t(include_str!("../templates/shot_plain.txt")),
            shot_precision: t(include_str!("../templates/shot_precision.txt")),
            refine_init: t(include_str!("../templates/refine_init.txt")),
            refine_step: t(include_str!("../templates/refine_step.txt")),
            map: t(include_str!("../templates/map.txt")),
            reduce: t(include_str!("../templates/reduce.txt")),
        }
    }
}

impl TemplatePack {
    /// Loads all eight template files from `dir`, checking required placeholders.
    pub fn load_dir(dir: &Path) -> Result<TemplatePack, TemplateError> {
        let mut texts = Vec::with_capacity(FILES.len());
        for (file, required) in FILES {
            let path = dir.join(file);
            let text = fs::read_to_string(&path).map_err(|e| TemplateError::Io {
                file: path.display().to_string(),
                message: e.to_string(),
            })?;
            for p in required {
                if !text.contains(&format!("{{{p}}}")) {
                    return Err(TemplateError::MissingPlaceholder {
                        file: file.to_string(),
                        placeholder: p.to_string(),
                    });
                }
            }
            texts.push(text.trim_end_matches('\n').to_string());
        }
        let mut it = texts.into_iter();
        let mut next = || it.next().expect("one text per file");
        Ok(TemplatePack {
            extract_base: next(),
            precision_clause: next(),
            shot_plain: next(),
            shot_precision: next(),
            refine_init: next(),
            refine_step: next(),
            map: next(),
            reduce: next(),
        })
    }

    /// Writes the pack as eight files into `dir`.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        let texts = [
            &self.extract_base,
            &self.precision_clause,
            &self.shot_plain,
            &self.shot_precision,
            &self.refine_init,
            &self.refine_step,
            &self.map,
            &self.reduce,
        ];
        for ((file, _), text) in FILES.iter().zip(texts) {
            fs::write(dir.join(file), format!("{text}\n"))?;
        }
        Ok(())
    }
}

/// Substitutes `{name}` for each supplied variable in a single pass; values
/// are never rescanned, and unknown braces are left as they are.
pub fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let hit = after.find('}').and_then(|close| {
            let name = &after[..close];
            vars.iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| (close, *v))
        });
        match hit {
            Some((close, value)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// True if `text` still contains a `{placeholder}` from the template vocabulary.
pub fn has_unfilled_placeholder(text: &str) -> bool {
    PLACEHOLDERS
        .iter()
        .any(|p| text.contains(&format!("{{{p}}}")))
}
