//! Classification metrics, exact significance tests and inter-annotator
//! agreement.

mod agreement;
mod hypothesis;
mod judges;
mod metrics;

pub use agreement::{cohen_kappa, fleiss_kappa, Kappa};
pub use hypothesis::{binomial_pmf, binomial_test, sign_test, welch_t_test, Sided, SignTest, TTest};
pub use judges::{judge_report, meta_judge, AnnotatedItem, HumanReport, JudgeAnnotations, JudgeRow, MetaMode};
pub use metrics::{micro_metrics, ClassMetrics, ConfusionCounts, Metric, MetricsReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("confusion counts are empty")]
    EmptyCounts,
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("k = {k} exceeds n = {n}")]
    KOutOfRange { k: u64, n: u64 },
    #[error("null probability must lie strictly between 0 and 1")]
    InvalidProbability,
    #[error("majority vote needs an odd number of judges, got {0}")]
    EvenJudgeCount(usize),
    #[error("no judges")]
    NoJudges,
    #[error("item {item:?} has {got} ratings, expected {expected}")]
    RaggedAnnotations { item: alloc::string::String, expected: usize, got: usize },
}
