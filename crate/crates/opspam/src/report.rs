//! JSON, CSV and plain-text renderings of results.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use opspam_core::corpus::{Corpus, DescriptiveStats, FoldPlan, Summary};
use opspam_core::experiments::{render_table, EvalReport, ItemPrediction};
use opspam_core::stats::{HumanReport, JudgeRow};
use opspam_core::svm::WeightRanking;
use opspam_core::Label;

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ReportError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| ReportError::Io { path: dir.into(), source })?;
    }
    fs::write(path, text).map_err(|source| ReportError::Io { path: path.into(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ReportError> {
    let json = serde_json::to_string_pretty(value).map_err(|source| ReportError::Json { path: path.into(), source })?;
    write_text(path, &(json + "\n"))
}

#[derive(Debug, Serialize, Deserialize)]
struct PredictionRow {
    id: String,
    fold: usize,
    truth: Label,
    predicted: Label,
    score: f64,
    correct: bool,
}

pub fn write_predictions(path: &Path, preds: &[ItemPrediction]) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.into(), source };
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in preds {
        w.serialize(PredictionRow {
            id: p.id.clone(),
            fold: p.fold + 1,
            truth: p.truth,
            predicted: p.predicted,
            score: p.score,
            correct: p.correct(),
        })
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io { path: path.into(), source: e.into_error() })?;
    write_text(path, &String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_predictions(path: &Path) -> Result<Vec<ItemPrediction>, ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.into(), source };
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let mut out = Vec::new();
    for row in r.deserialize::<PredictionRow>() {
        let row = row.map_err(csv_err)?;
        out.push(ItemPrediction {
            id: row.id,
            fold: row.fold.saturating_sub(1),
            truth: row.truth,
            predicted: row.predicted,
            score: row.score,
        });
    }
    Ok(out)
}

pub fn render_cv(report: &EvalReport) -> String {
    let mut out = render_table(&[(report.approach.name(), &report.metrics)]);
    out.push('\n');
    for f in &report.folds {
        let c = f.counts;
        let _ = write!(
            out,
            "fold {}: test {} (acc {:.1}%)",
            f.fold + 1,
            f.test_size,
            100.0 * c.correct() as f64 / c.total().max(1) as f64
        );
        if let Some(cv) = f.selection.c {
            let _ = write!(out, ", C = {cv}");
        }
        out.push('\n');
    }
    out
}

fn row_line(out: &mut String, row: &JudgeRow) {
    let m = &row.metrics;
    let _ = writeln!(
        out,
        "{:<10}  {:>7.1}%  {:>6.1} {:>6.1} {:>6.1}  {:>6.1} {:>6.1} {:>6.1}  p={:.3}",
        row.name,
        m.accuracy.rounded(),
        m.truthful.precision.rounded(),
        m.truthful.recall.rounded(),
        m.truthful.f1.rounded(),
        m.deceptive.precision.rounded(),
        m.deceptive.recall.rounded(),
        m.deceptive.f1.rounded(),
        row.binomial_p,
    );
}

pub fn render_judges(report: &HumanReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<10}  {:>8}  {:>20}  {:>20}", "", "", "Truthful P/R/F", "Deceptive P/R/F");
    for row in &report.judges {
        row_line(&mut out, row);
    }
    if let Some(m) = &report.majority {
        row_line(&mut out, m);
    }
    row_line(&mut out, &report.skeptic);
    out.push('\n');
    if let Some(k) = report.fleiss {
        let _ = writeln!(out, "Fleiss kappa: {:.3}{}", k.value, if k.degenerate { " (degenerate)" } else { "" });
    }
    for (a, b, k) in &report.pairwise_cohen {
        let _ = writeln!(out, "Cohen kappa judge{} / judge{}: {:.3}", a + 1, b + 1, k.value);
    }
    out
}

fn summary_line(out: &mut String, name: &str, s: Option<&Summary>) {
    match s {
        Some(s) => {
            let sd = s.sd.map_or("n/a".to_string(), |v| format!("{v:.2}"));
            let _ = writeln!(
                out,
                "{name:<16} n={:<5} min={:<8.2} max={:<8.2} mean={:<8.2} s={sd}",
                s.count, s.min, s.max, s.mean
            );
        }
        None => {
            let _ = writeln!(out, "{name:<16} (no data)");
        }
    }
}

pub fn render_stats(stats: &DescriptiveStats) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "reviews: {}", stats.count);
    summary_line(&mut out, "time (min)", stats.time.as_ref());
    summary_line(&mut out, "length (words)", Some(&stats.length));
    let t = stats.split_at_minutes;
    let _ = writeln!(out, "t < {t}: {} reviews", stats.below.count);
    summary_line(&mut out, "  length", stats.below.length.as_ref());
    let _ = writeln!(out, "t >= {t}: {} reviews", stats.at_or_above.count);
    summary_line(&mut out, "  length", stats.at_or_above.length.as_ref());
    out
}

#[derive(Debug, Serialize)]
struct WeightRow<'a> {
    rank: usize,
    feature: &'a str,
    block: &'a str,
    avg_weight: f64,
}

/// Truthful (positive) rows first, then deceptive (negative) rows, each
/// ranked from 1.
pub fn write_weights(path: &Path, ranking: &WeightRanking) -> Result<(), ReportError> {
    let csv_err = |source| ReportError::Csv { path: path.into(), source };
    let mut w = csv::Writer::from_writer(Vec::new());
    for list in [&ranking.positive, &ranking.negative] {
        for (i, f) in list.iter().enumerate() {
            w.serialize(WeightRow { rank: i + 1, feature: &f.name, block: &f.block, avg_weight: f.weight })
                .map_err(csv_err)?;
        }
    }
    if ranking.positive.is_empty() && ranking.negative.is_empty() {
        w.write_record(["rank", "feature", "block", "avg_weight"]).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io { path: path.into(), source: e.into_error() })?;
    write_text(path, &String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn render_weights(ranking: &WeightRanking) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>4}  {:<28} {:>9}   {:<28} {:>9}", "", "Truthful", "", "Deceptive", "");
    let n = ranking.positive.len().max(ranking.negative.len());
    for i in 0..n {
        let cell = |list: &[opspam_core::svm::RankedFeature]| {
            list.get(i).map_or((String::new(), String::new()), |f| (f.name.clone(), format!("{:.4}", f.weight)))
        };
        let (tn, tw) = cell(&ranking.positive);
        let (dn, dw) = cell(&ranking.negative);
        let _ = writeln!(out, "{:>4}  {:<28} {:>9}   {:<28} {:>9}", i + 1, tn, tw, dn, dw);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldSummary {
    pub fold: usize,
    pub hotels: Vec<String>,
    pub truthful: usize,
    pub deceptive: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusSummary {
    pub corpus_hash: String,
    pub reviews: usize,
    pub hotels: usize,
    pub truthful: usize,
    pub deceptive: usize,
    pub per_hotel: BTreeMap<String, (usize, usize)>,
    pub k: usize,
    pub seed: u64,
    pub plan: FoldPlan,
    pub folds: Vec<FoldSummary>,
}

pub fn corpus_summary(corpus: &Corpus, plan: &FoldPlan, seed: u64) -> CorpusSummary {
    let (truthful, deceptive) = corpus.class_counts();
    let folds = (0..plan.k)
        .map(|f| {
            let members = plan.members(corpus, f);
            let t = members.iter().filter(|&&i| corpus.reviews()[i].label == Label::Truthful).count();
            FoldSummary {
                fold: f + 1,
                hotels: plan.hotels_in(f).into_iter().map(String::from).collect(),
                truthful: t,
                deceptive: members.len() - t,
            }
        })
        .collect();
    CorpusSummary {
        corpus_hash: corpus.content_hash(),
        reviews: corpus.len(),
        hotels: corpus.hotels().len(),
        truthful,
        deceptive,
        per_hotel: corpus.hotel_counts().into_iter().map(|(h, c)| (h.to_string(), c)).collect(),
        k: plan.k,
        seed,
        plan: plan.clone(),
        folds,
    }
}

pub fn render_corpus_summary(s: &CorpusSummary) -> String {
    let mut out = String::new();
    let pct = |n: usize| 100.0 * n as f64 / s.reviews.max(1) as f64;
    let _ = writeln!(
        out,
        "{} reviews, {} hotels, {} truthful / {} deceptive ({:.0}/{:.0})",
        s.reviews,
        s.hotels,
        s.truthful,
        s.deceptive,
        pct(s.truthful),
        pct(s.deceptive)
    );
    for f in &s.folds {
        let _ = writeln!(
            out,
            "fold {}: {} hotels, {} truthful / {} deceptive",
            f.fold,
            f.hotels.len(),
            f.truthful,
            f.deceptive
        );
    }
    out
}
