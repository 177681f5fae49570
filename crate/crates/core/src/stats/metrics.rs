use core::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::label::Label;

/// Binary confusion matrix, `matrix[truth][predicted]` indexed by
/// [`Label::index`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub matrix: [[u64; 2]; 2],
}

impl ConfusionCounts {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Self {
        let mut c = Self::default();
        for (truth, pred) in pairs {
            c.record(truth, pred);
        }
        c
    }

    /// Counts from per-class hit totals, e.g. 70 of 80 truthful and 29 of 80
    /// deceptive reviews labelled correctly.
    pub fn from_class_hits(truthful_hits: u64, truthful_total: u64, deceptive_hits: u64, deceptive_total: u64) -> Self {
        Self {
            matrix: [
                [truthful_hits, truthful_total - truthful_hits],
                [deceptive_total - deceptive_hits, deceptive_hits],
            ],
        }
    }

    pub fn record(&mut self, truth: Label, predicted: Label) {
        self.matrix[truth.index()][predicted.index()] += 1;
    }

    pub fn tp(&self, class: Label) -> u64 {
        self.matrix[class.index()][class.index()]
    }

    pub fn fp(&self, class: Label) -> u64 {
        self.matrix[class.other().index()][class.index()]
    }

    pub fn fn_(&self, class: Label) -> u64 {
        self.matrix[class.index()][class.other().index()]
    }

    pub fn tn(&self, class: Label) -> u64 {
        self.tp(class.other())
    }

    pub fn total(&self) -> u64 {
        self.matrix.iter().flatten().sum()
    }

    pub fn correct(&self) -> u64 {
        self.matrix[0][0] + self.matrix[1][1]
    }

    /// Number of items whose true label is `class`.
    pub fn support(&self, class: Label) -> u64 {
        self.matrix[class.index()].iter().sum()
    }
}

impl Add for ConfusionCounts {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for ConfusionCounts {
    fn add_assign(&mut self, rhs: Self) {
        for t in 0..2 {
            for p in 0..2 {
                self.matrix[t][p] += rhs.matrix[t][p];
            }
        }
    }
}

/// A percentage; `defined` is false when its denominator was zero, in which
/// case `value` is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub defined: bool,
}

impl Metric {
    fn ratio(num: u64, den: u64) -> Self {
        if den == 0 {
            Metric { value: 0.0, defined: false }
        } else {
            Metric { value: 100.0 * num as f64 / den as f64, defined: true }
        }
    }

    /// Value rounded half away from zero to one decimal.
    pub fn rounded(&self) -> f64 {
        crate::math::round(self.value * 10.0) / 10.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: Metric,
    pub recall: Metric,
    pub f1: Metric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: Metric,
    pub truthful: ClassMetrics,
    pub deceptive: ClassMetrics,
}

impl MetricsReport {
    pub fn class(&self, class: Label) -> &ClassMetrics {
        match class {
            Label::Truthful => &self.truthful,
            Label::Deceptive => &self.deceptive,
        }
    }
}

fn class_metrics(c: &ConfusionCounts, class: Label) -> ClassMetrics {
    let (tp, fp, fn_) = (c.tp(class), c.fp(class), c.fn_(class));
    ClassMetrics {
        precision: Metric::ratio(tp, tp + fp),
        recall: Metric::ratio(tp, tp + fn_),
        // 2PR/(P+R) written over counts so it is exact.
        f1: Metric::ratio(2 * tp, 2 * tp + fp + fn_),
    }
}

/// Accuracy and per-class precision, recall and F1 (as percentages) from
/// aggregate counts.
pub fn micro_metrics(conf: &ConfusionCounts) -> Result<MetricsReport, StatsError> {
    if conf.total() == 0 {
        return Err(StatsError::EmptyCounts);
    }
    Ok(MetricsReport {
        accuracy: Metric::ratio(conf.correct(), conf.total()),
        truthful: class_metrics(conf, Label::Truthful),
        deceptive: class_metrics(conf, Label::Deceptive),
    })
}
