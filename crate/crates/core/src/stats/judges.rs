use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{
    binomial_test, cohen_kappa, fleiss_kappa, micro_metrics, ConfusionCounts, Kappa, MetricsReport, Sided,
    StatsError,
};
use crate::label::Label;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedItem {
    pub id: String,
    pub truth: Label,
    pub judgments: Vec<Label>,
}

/// Human judgments of a set of items; every item has one label per judge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JudgeAnnotations {
    items: Vec<AnnotatedItem>,
    judges: usize,
}

impl JudgeAnnotations {
    pub fn new(items: Vec<AnnotatedItem>) -> Result<Self, StatsError> {
        let Some(first) = items.first() else {
            return Err(StatsError::TooFewSamples { needed: 1, got: 0 });
        };
        let judges = first.judgments.len();
        if judges == 0 {
            return Err(StatsError::NoJudges);
        }
        for it in &items {
            if it.judgments.len() != judges {
                return Err(StatsError::RaggedAnnotations {
                    item: it.id.clone(),
                    expected: judges,
                    got: it.judgments.len(),
                });
            }
        }
        Ok(Self { items, judges })
    }

    pub fn items(&self) -> &[AnnotatedItem] {
        &self.items
    }

    pub fn judge_count(&self) -> usize {
        self.judges
    }

    pub fn truths(&self) -> Vec<Label> {
        self.items.iter().map(|i| i.truth).collect()
    }

    /// All labels given by judge `j`.
    pub fn judge(&self, j: usize) -> Vec<Label> {
        self.items.iter().map(|i| i.judgments[j]).collect()
    }

    pub fn per_judge(&self) -> Vec<Vec<Label>> {
        (0..self.judges).map(|j| self.judge(j)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetaMode {
    /// Deceptive when most judges say so.
    Majority,
    /// Deceptive when any judge says so.
    Skeptic,
}

/// Combine per-judge label lists item by item.
pub fn meta_judge(per_judge: &[Vec<Label>], mode: MetaMode) -> Result<Vec<Label>, StatsError> {
    let Some(first) = per_judge.first() else {
        return Err(StatsError::NoJudges);
    };
    for j in per_judge {
        if j.len() != first.len() {
            return Err(StatsError::LengthMismatch(first.len(), j.len()));
        }
    }
    let m = per_judge.len();
    if mode == MetaMode::Majority && m % 2 == 0 {
        return Err(StatsError::EvenJudgeCount(m));
    }
    Ok((0..first.len())
        .map(|i| {
            let deceptive = per_judge.iter().filter(|j| j[i] == Label::Deceptive).count();
            let vote = match mode {
                MetaMode::Majority => 2 * deceptive > m,
                MetaMode::Skeptic => deceptive > 0,
            };
            if vote { Label::Deceptive } else { Label::Truthful }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRow {
    pub name: String,
    pub counts: ConfusionCounts,
    pub metrics: MetricsReport,
    /// Two-tailed binomial test of the number correct against chance.
    pub binomial_p: f64,
}

impl JudgeRow {
    fn new(name: String, truths: &[Label], predicted: &[Label]) -> Result<Self, StatsError> {
        let counts = ConfusionCounts::from_pairs(truths.iter().copied().zip(predicted.iter().copied()));
        let metrics = micro_metrics(&counts)?;
        let binomial_p = binomial_test(counts.correct(), counts.total(), 0.5, Sided::TwoTailed)?;
        Ok(Self { name, counts, metrics, binomial_p })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HumanReport {
    pub judges: Vec<JudgeRow>,
    /// Absent for an even number of judges.
    pub majority: Option<JudgeRow>,
    pub skeptic: JudgeRow,
    pub fleiss: Option<Kappa>,
    /// Cohen's kappa for each judge pair (i < j).
    pub pairwise_cohen: Vec<(usize, usize, Kappa)>,
}

impl HumanReport {
    pub fn max_pairwise_cohen(&self) -> Option<f64> {
        self.pairwise_cohen.iter().map(|p| p.2.value).reduce(f64::max)
    }
}

/// Per-judge and meta-judge performance plus agreement statistics.
pub fn judge_report(ann: &JudgeAnnotations) -> Result<HumanReport, StatsError> {
    let truths = ann.truths();
    let per_judge = ann.per_judge();
    let mut judges = Vec::new();
    for (j, labels) in per_judge.iter().enumerate() {
        judges.push(JudgeRow::new(alloc::format!("judge{}", j + 1), &truths, labels)?);
    }
    let majority = if per_judge.len() % 2 == 1 {
        Some(JudgeRow::new("majority".into(), &truths, &meta_judge(&per_judge, MetaMode::Majority)?)?)
    } else {
        None
    };
    let skeptic = JudgeRow::new("skeptic".into(), &truths, &meta_judge(&per_judge, MetaMode::Skeptic)?)?;
    let fleiss = if ann.judge_count() >= 2 {
        let rows: Vec<&[Label]> = ann.items().iter().map(|i| i.judgments.as_slice()).collect();
        Some(fleiss_kappa(&rows)?)
    } else {
        None
    };
    let mut pairwise_cohen = Vec::new();
    for a in 0..per_judge.len() {
        for b in a + 1..per_judge.len() {
            pairwise_cohen.push((a, b, cohen_kappa(&per_judge[a], &per_judge[b])?));
        }
    }
    Ok(HumanReport { judges, majority, skeptic, fleiss, pairwise_cohen })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use Label::{Deceptive as D, Truthful as T};

    #[test]
    fn meta_definitions() {
        let judges = vec![vec![D, T, T], vec![D, T, T], vec![T, D, T]];
        assert_eq!(meta_judge(&judges, MetaMode::Majority).unwrap(), vec![D, T, T]);
        assert_eq!(meta_judge(&judges, MetaMode::Skeptic).unwrap(), vec![D, D, T]);
        assert_eq!(meta_judge(&judges[..2], MetaMode::Majority).unwrap_err(), StatsError::EvenJudgeCount(2));
    }

    #[test]
    fn identical_judges() {
        let items = (0..10)
            .map(|i| {
                let l = if i % 3 == 0 { D } else { T };
                AnnotatedItem { id: alloc::format!("{i}"), truth: l, judgments: vec![l, l] }
            })
            .collect();
        let r = judge_report(&JudgeAnnotations::new(items).unwrap()).unwrap();
        assert_eq!(r.pairwise_cohen[0].2.value, 1.0);
        assert_eq!(r.judges[0].metrics.accuracy.value, 100.0);
        assert!(r.majority.is_none());
    }
}
