//! Relative-error tolerance accuracy (RETA), plain accuracy, and the
//! relative percentage difference (RPD) between two accuracies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("no outcomes to score")]
    EmptyOutcomes,
    #[error("RPD is undefined when both accuracies are 0")]
    UndefinedRpd,
    #[error("invalid RETA levels: {0}")]
    InvalidLevels(String),
}

/// True when `pred` is within `threshold` relative error of `truth`
/// (inclusive). A zero truth only accepts an exact zero.
pub fn reta_correct(pred: f64, truth: f64, threshold: f64) -> bool {
    if !pred.is_finite() {
        return false;
    }
    if truth == 0.0 {
        return pred == 0.0;
    }
    (pred - truth).abs() / truth.abs() <= threshold
}

/// Relative error, or `None` when it is undefined (zero truth, nonzero pred).
pub fn relative_error(pred: f64, truth: f64) -> Option<f64> {
    if !pred.is_finite() {
        None
    } else if truth == 0.0 {
        (pred == 0.0).then_some(0.0)
    } else {
        Some((pred - truth).abs() / truth.abs())
    }
}

pub fn accuracy(outcomes: &[bool]) -> Result<f64, MetricError> {
    if outcomes.is_empty() {
        return Err(MetricError::EmptyOutcomes);
    }
    let correct = outcomes.iter().filter(|&&c| c).count();
    Ok(correct as f64 / outcomes.len() as f64)
}

/// |x − y| divided by the mean of x and y.
pub fn rpd(acc_x: f64, acc_y: f64) -> Result<f64, MetricError> {
    if acc_x + acc_y == 0.0 {
        return Err(MetricError::UndefinedRpd);
    }
    Ok((acc_x - acc_y).abs() / ((acc_x + acc_y) / 2.0))
}

/// Strictly increasing, non-negative thresholds expressed as fractions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct RetaLevels(Vec<f64>);

impl RetaLevels {
    pub fn new(levels: Vec<f64>) -> Result<Self, MetricError> {
        if levels.is_empty() {
            return Err(MetricError::InvalidLevels("at least one level is required".into()));
        }
        if let Some(bad) = levels.iter().find(|l| !l.is_finite() || **l < 0.0) {
            return Err(MetricError::InvalidLevels(format!("{bad} is not a non-negative fraction")));
        }
        if levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MetricError::InvalidLevels("levels must be strictly increasing".into()));
        }
        Ok(RetaLevels(levels))
    }

    /// 1%, 3%, 5%, 10%.
    pub fn standard() -> Self {
        RetaLevels(vec![0.01, 0.03, 0.05, 0.10])
    }

    /// 0%, 0.001%, 0.01%, 0.1%.
    pub fn fine() -> Self {
        RetaLevels(vec![0.0, 0.00001, 0.0001, 0.001])
    }

    /// Parses a comma-separated list such as `0,0.001`.
    pub fn parse(list: &str) -> Result<Self, MetricError> {
        let levels = list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| MetricError::InvalidLevels(format!("`{}` is not a number", s.trim())))
            })
            .collect::<Result<Vec<_>, _>>()?;
        RetaLevels::new(levels)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Default for RetaLevels {
    fn default() -> Self {
        RetaLevels::standard()
    }
}

impl TryFrom<Vec<f64>> for RetaLevels {
    type Error = MetricError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        RetaLevels::new(v)
    }
}

impl From<RetaLevels> for Vec<f64> {
    fn from(l: RetaLevels) -> Self {
        l.0
    }
}

/// Renders a fraction as a percentage label, e.g. 0.00001 → "0.001%".
pub fn percent_label(level: f64) -> String {
    let s = format!("{:.8}", level * 100.0);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    format!("{s}%")
}
