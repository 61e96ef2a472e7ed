//! Confusion matrix, per-class precision/recall/F1, macro averages and
//! accuracy, with a text table and a JSON form.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Label;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("gold has {gold} labels but predictions have {predicted}")]
    LengthMismatch { gold: usize, predicted: usize },
    #[error("empty input: no labeled documents to evaluate")]
    EmptyInput,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
}

/// Counts indexed `[actual][predicted]` in `[Real, Fake]` order.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfusionMatrix {
    pub counts: [[u64; 2]; 2],
}

impl ConfusionMatrix {
    pub fn from_counts(counts: [[u64; 2]; 2]) -> Self {
        Self { counts }
    }

    pub fn get(&self, actual: Label, predicted: Label) -> u64 {
        self.counts[actual.index()][predicted.index()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        self.counts[0][0] + self.counts[1][1]
    }

    /// Gold count of `label`.
    pub fn row_sum(&self, label: Label) -> u64 {
        self.counts[label.index()].iter().sum()
    }

    /// Predicted count of `label`.
    pub fn column_sum(&self, label: Label) -> u64 {
        self.counts.iter().map(|row| row[label.index()]).sum()
    }
}

pub fn confusion(gold: &[Label], predicted: &[Label]) -> Result<ConfusionMatrix, EvalError> {
    if gold.len() != predicted.len() {
        return Err(EvalError::LengthMismatch {
            gold: gold.len(),
            predicted: predicted.len(),
        });
    }
    if gold.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut m = ConfusionMatrix::default();
    for (a, p) in gold.iter().zip(predicted) {
        m.counts[a.index()][p.index()] += 1;
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl ClassMetrics {
    pub fn new(precision: f64, recall: f64) -> Self {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Self { precision, recall, f1 }
    }

    /// Unweighted mean of each field.
    pub fn mean(a: &Self, b: &Self) -> Self {
        Self {
            precision: (a.precision + b.precision) / 2.0,
            recall: (a.recall + b.recall) / 2.0,
            f1: (a.f1 + b.f1) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerClass {
    pub real: ClassMetrics,
    pub fake: ClassMetrics,
}

impl PerClass {
    pub fn get(&self, label: Label) -> &ClassMetrics {
        match label {
            Label::Real => &self.real,
            Label::Fake => &self.fake,
        }
    }
}

/// Full evaluation result. Serializes to
/// `{accuracy, matrix, classes: {real, fake}, macro, n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub accuracy: f64,
    pub matrix: ConfusionMatrix,
    pub classes: PerClass,
    #[serde(rename = "macro")]
    pub macro_avg: ClassMetrics,
    pub n: u64,
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn report(matrix: &ConfusionMatrix) -> Result<EvaluationReport, EvalError> {
    let n = matrix.total();
    if n == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let metrics = |label: Label| {
        let hit = matrix.get(label, label);
        ClassMetrics::new(ratio(hit, matrix.column_sum(label)), ratio(hit, matrix.row_sum(label)))
    };
    let classes = PerClass {
        real: metrics(Label::Real),
        fake: metrics(Label::Fake),
    };
    Ok(EvaluationReport {
        accuracy: ratio(matrix.trace(), n),
        matrix: *matrix,
        macro_avg: ClassMetrics::mean(&classes.real, &classes.fake),
        classes,
        n,
    })
}

/// Decimal half-up rounding to 2 places. The small offset keeps values such
/// as 0.285 (stored as 0.28499999...) on the side their decimal form implies.
pub fn round_half_up_2(x: f64) -> f64 {
    ((x * 100.0) + 0.5 + 1e-9).floor() / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    TextTable,
    Json,
}

pub fn render_report(report: &EvaluationReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(report).expect("report is plain data"),
        ReportFormat::TextTable => render_table(report),
    }
}

fn render_table(report: &EvaluationReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:>10} {:>10} {:>10}", "", "precision", "recall", "f1-score");
    let mut row = |name: &str, m: &ClassMetrics| {
        let _ = writeln!(
            out,
            "{:<6} {:>10.2} {:>10.2} {:>10.2}",
            name,
            round_half_up_2(m.precision),
            round_half_up_2(m.recall),
            round_half_up_2(m.f1)
        );
    };
    row("Real", &report.classes.real);
    row("Fake", &report.classes.fake);
    row("avg", &report.macro_avg);
    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "accuracy {:.2}% (n={})",
        round_half_up_2(report.accuracy * 100.0),
        report.n
    );
    let c = &report.matrix.counts;
    let _ = writeln!(out, "confusion (rows actual, columns predicted)");
    let _ = writeln!(out, "{:<6} {:>8} {:>8}", "", "real", "fake");
    let _ = writeln!(out, "{:<6} {:>8} {:>8}", "real", c[0][0], c[0][1]);
    let _ = writeln!(out, "{:<6} {:>8} {:>8}", "fake", c[1][0], c[1][1]);
    out
}
