//! Benchmark reports: JSON for machines, an aligned table for people.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::metrics::{percent_label, rpd};
use super::task::Truth;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskOutcome {
    pub index: usize,
    pub doc: String,
    pub keyword: String,
    pub truth: Truth,
    pub completed_keyword: Option<String>,
    pub raw_answer: Option<String>,
    pub predicted: Option<f64>,
    pub relative_error: Option<f64>,
    /// One verdict per RETA level.
    pub correct: Vec<bool>,
    pub failure: Option<String>,
    pub llm_calls: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub name: String,
    pub task_count: usize,
    pub llm_calls: u64,
    /// Accuracy per RETA level, in level order.
    pub accuracy: Vec<f64>,
    /// Unweighted mean of `accuracy`.
    pub average: f64,
    pub tasks: Vec<TaskOutcome>,
}

/// RPD between two pipelines, per level and on the average accuracy.
/// `None` where both accuracies are 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub rpd: Vec<Option<f64>>,
    pub rpd_average: Option<f64>,
}

impl Comparison {
    pub fn between(a: &PipelineReport, b: &PipelineReport) -> Comparison {
        Comparison {
            a: a.name.clone(),
            b: b.name.clone(),
            rpd: a
                .accuracy
                .iter()
                .zip(&b.accuracy)
                .map(|(x, y)| rpd(*x, *y).ok())
                .collect(),
            rpd_average: rpd(a.average, b.average).ok(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub levels: Vec<f64>,
    pub pipelines: Vec<PipelineReport>,
    pub comparisons: Vec<Comparison>,
    /// Kept out of the JSON so reports of identical runs compare equal.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn pipeline(&self, name: &str) -> Option<&PipelineReport> {
        self.pipelines.iter().find(|p| p.name == name)
    }

    /// Accuracy never decreases as the tolerance grows, for every pipeline.
    pub fn is_monotone(&self) -> bool {
        self.pipelines
            .iter()
            .all(|p| p.accuracy.windows(2).all(|w| w[0] <= w[1]))
    }

    /// One row per level plus an Average row, one column per pipeline.
    pub fn to_text(&self) -> String {
        let mut rows: Vec<Vec<String>> = Vec::new();
        let mut header = vec!["RETA".to_string()];
        header.extend(self.pipelines.iter().map(|p| p.name.clone()));
        rows.push(header);
        for (i, level) in self.levels.iter().enumerate() {
            let mut row = vec![percent_label(*level)];
            row.extend(self.pipelines.iter().map(|p| format!("{:.4}", p.accuracy[i])));
            rows.push(row);
        }
        let mut avg = vec!["Average".to_string()];
        avg.extend(self.pipelines.iter().map(|p| format!("{:.4}", p.average)));
        rows.push(avg);

        let columns = rows[0].len();
        let widths: Vec<usize> = (0..columns)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(c, cell)| {
                    if c == 0 {
                        format!("{cell:<w$}", w = widths[c])
                    } else {
                        format!("{cell:>w$}", w = widths[c])
                    }
                })
                .collect();
            out.push_str(cells.join("  ").trim_end());
            out.push('\n');
        }
        out.push('\n');
        for p in &self.pipelines {
            out.push_str(&format!("{}: {} tasks, {} LLM calls\n", p.name, p.task_count, p.llm_calls));
        }
        for c in &self.comparisons {
            let value = c
                .rpd_average
                .map_or_else(|| "undefined".to_string(), |v| format!("{v:.4}"));
            out.push_str(&format!("RPD({}, {}) on average accuracy: {value}\n", c.a, c.b));
        }
        out
    }
}
