use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ExtractError;
use crate::document::DocMetadata;
use crate::template::{render, TemplatePack};

/// Extraction prompt variants: R adds the precision requirement, S adds a
/// worked example with a rounded answer, SP one that keeps every digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum PromptVariant {
    #[serde(rename = "TD_O")]
    TdO,
    #[serde(rename = "TD_R")]
    TdR,
    #[serde(rename = "TD_S")]
    TdS,
    #[serde(rename = "TD_RS")]
    TdRs,
    #[serde(rename = "TD_SP")]
    TdSp,
    #[default]
    #[serde(rename = "TD_RSP")]
    TdRsp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleStyle {
    Rounded,
    Precise,
}

impl PromptVariant {
    pub const ALL: [PromptVariant; 6] = [
        PromptVariant::TdO,
        PromptVariant::TdR,
        PromptVariant::TdS,
        PromptVariant::TdRs,
        PromptVariant::TdSp,
        PromptVariant::TdRsp,
    ];

    pub fn has_precision_clause(self) -> bool {
        matches!(self, PromptVariant::TdR | PromptVariant::TdRs | PromptVariant::TdRsp)
    }

    pub fn example_style(self) -> Option<ExampleStyle> {
        match self {
            PromptVariant::TdS | PromptVariant::TdRs => Some(ExampleStyle::Rounded),
            PromptVariant::TdSp | PromptVariant::TdRsp => Some(ExampleStyle::Precise),
            PromptVariant::TdO | PromptVariant::TdR => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PromptVariant::TdO => "TD_O",
            PromptVariant::TdR => "TD_R",
            PromptVariant::TdS => "TD_S",
            PromptVariant::TdRs => "TD_RS",
            PromptVariant::TdSp => "TD_SP",
            PromptVariant::TdRsp => "TD_RSP",
        }
    }
}

impl fmt::Display for PromptVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PromptVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_uppercase().replace('-', "_");
        PromptVariant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| format!("unknown prompt variant `{s}`"))
    }
}

/// Which document metadata is appended to the bare keyword.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum CompletionMode {
    #[serde(rename = "K")]
    K,
    #[serde(rename = "K_C")]
    KC,
    #[serde(rename = "K_T")]
    KT,
    #[default]
    #[serde(rename = "K_T_C")]
    KTC,
}

impl CompletionMode {
    pub const ALL: [CompletionMode; 4] = [
        CompletionMode::K,
        CompletionMode::KC,
        CompletionMode::KT,
        CompletionMode::KTC,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompletionMode::K => "K",
            CompletionMode::KC => "K_C",
            CompletionMode::KT => "K_T",
            CompletionMode::KTC => "K_T_C",
        }
    }
}

impl fmt::Display for CompletionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CompletionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.to_ascii_uppercase().replace('-', "_");
        CompletionMode::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| format!("unknown completion mode `{s}`"))
    }
}

/// Enriches a keyword with company and/or period from document metadata.
pub fn complete_keyword(
    keyword: &str,
    metadata: &DocMetadata,
    mode: CompletionMode,
) -> Result<String, ExtractError> {
    let field = |value: &Option<String>, name: &'static str| {
        value
            .as_deref()
            .map(str::trim)
            .filter(|v| !v.is_empty())
            .map(str::to_string)
            .ok_or(ExtractError::MissingMetadata(name))
    };
    Ok(match mode {
        CompletionMode::K => keyword.to_string(),
        CompletionMode::KC => format!("{keyword} of {}", field(&metadata.company, "company")?),
        CompletionMode::KT => format!("{keyword} in {}", field(&metadata.time, "time")?),
        CompletionMode::KTC => {
            let company = field(&metadata.company, "company")?;
            let time = field(&metadata.time, "time")?;
            format!("{keyword} of {company} in {time}")
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub input: String,
    pub output: String,
}

impl Shot {
    pub fn new(input: impl Into<String>, output: impl Into<String>) -> Self {
        Shot {
            input: input.into(),
            output: output.into(),
        }
    }
}

pub const MAX_SHOTS: usize = 3;

/// Example the S variants embed: the answer is rounded.
const ROUNDED_EXAMPLE: (&str, &str) = (
    "Net sales for fiscal 2021 were $365,817 million, compared with $274,515 million a year earlier.",
    "$366 billion",
);

/// Example the SP variants embed: the answer keeps every digit.
const PRECISE_EXAMPLE: (&str, &str) = (
    "Net sales for fiscal 2021 were $365,817 million, compared with $274,515 million a year earlier.",
    "$365,817 million",
);

fn builtin_shots() -> [Shot; MAX_SHOTS] {
    [
        Shot::new(
            "Total assets at the end of fiscal 2020 were $323,888 million.",
            "$323,888 million",
        ),
        Shot::new(
            "Operating income for the year was $66,288 million, or 24.1% of net sales.",
            "$66,288 million",
        ),
        Shot::new(
            "Research and development expense was $18,752.5 thousand in 2019.",
            "$18,752.5 thousand",
        ),
    ]
}

/// In-prompt examples appended after the variant's own content.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotConfig {
    shots: Vec<Shot>,
}

impl ShotConfig {
    /// The first `count` shots of the built-in library.
    pub fn builtin(count: usize) -> Result<ShotConfig, ExtractError> {
        if count > MAX_SHOTS {
            return Err(ExtractError::TooManyShots(count));
        }
        Ok(ShotConfig {
            shots: builtin_shots().into_iter().take(count).collect(),
        })
    }

    pub fn custom(shots: Vec<Shot>) -> Result<ShotConfig, ExtractError> {
        if shots.len() > MAX_SHOTS {
            return Err(ExtractError::TooManyShots(shots.len()));
        }
        Ok(ShotConfig { shots })
    }

    pub fn shot_count(&self) -> usize {
        self.shots.len()
    }

    pub fn shots(&self) -> &[Shot] {
        &self.shots
    }
}

impl Default for ShotConfig {
    fn default() -> Self {
        ShotConfig::builtin(1).expect("one built-in shot")
    }
}

/// Composes the extraction prompt: task description with the summary, then
/// the precision clause (R variants), then the variant's example (S/SP
/// variants), then configured shots.
pub fn build_extraction_prompt(
    templates: &TemplatePack,
    completed_keyword: &str,
    summary: &str,
    variant: PromptVariant,
    shots: &ShotConfig,
) -> Result<String, ExtractError> {
    if summary.trim().is_empty() {
        return Err(ExtractError::EmptySummary);
    }
    let mut blocks = vec![render(
        &templates.extract_base,
        &[("keyword", completed_keyword), ("summary", summary)],
    )];
    if variant.has_precision_clause() {
        blocks.push(templates.precision_clause.clone());
    }
    let shot_template = match variant.example_style() {
        Some(ExampleStyle::Precise) => &templates.shot_precision,
        _ => &templates.shot_plain,
    };
    let shot_block = |input: &str, output: &str| {
        render(shot_template, &[("shot_input", input), ("shot_output", output)])
    };
    match variant.example_style() {
        Some(ExampleStyle::Rounded) => blocks.push(shot_block(ROUNDED_EXAMPLE.0, ROUNDED_EXAMPLE.1)),
        Some(ExampleStyle::Precise) => blocks.push(shot_block(PRECISE_EXAMPLE.0, PRECISE_EXAMPLE.1)),
        None => {}
    }
    for shot in shots.shots() {
        blocks.push(shot_block(&shot.input, &shot.output));
    }
    Ok(blocks.join("\n\n"))
}
