//! Hotel-blocked nested cross-validation.
//!
//! For every outer test fold, hyperparameters are chosen by leave-one-fold-out
//! CV over the remaining folds, a model is retrained on all of them, and the
//! test fold is scored. Feature spaces and vocabularies are rebuilt from the
//! training reviews each time, so held-out hotels never leak into features.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, FoldPlan};
use crate::features::{
    build_ngram_space, combine_blocks, lexicon_space, lexicon_vector, ngram_vector, pos_space, pos_vector,
    FeatureError, FeatureSpace, Lexicon, SparseVector, TagProvider, LEXICON_BLOCK, NGRAM_BLOCK, PENN_TAGSET,
};
use crate::hashing::{derive_seed, FieldHasher};
use crate::label::Label;
use crate::lm::{classify_ml, ClassLMPair, LmError};
use crate::stats::{micro_metrics, sign_test, ConfusionCounts, MetricsReport, Sided, SignTest, StatsError};
use crate::svm::{train_linear_svm, LinearModel, SvmError, SvmParams, DEFAULT_C_GRID, DEFAULT_TOL};
use crate::textproc::{build_vocab, tokenize_seq, TokenSeq};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("unknown approach {0:?}")]
    UnknownApproach(String),
    #[error("fold plan does not cover every hotel in the corpus")]
    PlanMismatch,
    #[error("fold {fold} {part} set holds a single class")]
    SingleClassFold { fold: usize, part: &'static str },
    #[error("approach needs a lexicon")]
    MissingLexicon,
    #[error("no POS tags for review {0:?}")]
    MissingTags(String),
    #[error("review {id:?}: {source}")]
    Tagged { id: String, source: FeatureError },
    #[error("training documents overlap test fold {0}")]
    Leakage(usize),
    #[error("expected {expected} fold results, got {got}")]
    FoldCount { expected: usize, got: usize },
    #[error("reports cover different items")]
    ItemMismatch,
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Svm(#[from] SvmError),
    #[error(transparent)]
    Lm(#[from] LmError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    PosSvm,
    LexiconSvm,
    UnigramsSvm,
    BigramsSvm,
    TrigramsSvm,
    LexiconBigramsSvm,
    UnigramsNb,
    BigramsNb,
    TrigramsNb,
}

impl Approach {
    pub const ALL: [Approach; 9] = [
        Approach::PosSvm,
        Approach::LexiconSvm,
        Approach::UnigramsSvm,
        Approach::BigramsSvm,
        Approach::TrigramsSvm,
        Approach::LexiconBigramsSvm,
        Approach::UnigramsNb,
        Approach::BigramsNb,
        Approach::TrigramsNb,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Approach::PosSvm => "POS_SVM",
            Approach::LexiconSvm => "LEXICON_SVM",
            Approach::UnigramsSvm => "UNIGRAMS_SVM",
            Approach::BigramsSvm => "BIGRAMS+_SVM",
            Approach::TrigramsSvm => "TRIGRAMS+_SVM",
            Approach::LexiconBigramsSvm => "LEXICON+BIGRAMS+_SVM",
            Approach::UnigramsNb => "UNIGRAMS_NB",
            Approach::BigramsNb => "BIGRAMS+_NB",
            Approach::TrigramsNb => "TRIGRAMS+_NB",
        }
    }

    /// Highest n-gram order used, if any.
    pub fn ngram_order(self) -> Option<usize> {
        match self {
            Approach::UnigramsSvm | Approach::UnigramsNb => Some(1),
            Approach::BigramsSvm | Approach::BigramsNb | Approach::LexiconBigramsSvm => Some(2),
            Approach::TrigramsSvm | Approach::TrigramsNb => Some(3),
            Approach::PosSvm | Approach::LexiconSvm => None,
        }
    }

    pub fn is_language_model(self) -> bool {
        matches!(self, Approach::UnigramsNb | Approach::BigramsNb | Approach::TrigramsNb)
    }

    pub fn needs_lexicon(self) -> bool {
        matches!(self, Approach::LexiconSvm | Approach::LexiconBigramsSvm)
    }

    pub fn needs_tags(self) -> bool {
        self == Approach::PosSvm
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Approach {
    type Err = ExperimentError;

    /// Accepts the canonical names case-insensitively, with `LIWC` as an
    /// alias for `LEXICON`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace("LIWC", "LEXICON");
        Approach::ALL
            .into_iter()
            .find(|a| a.name() == norm)
            .ok_or_else(|| ExperimentError::UnknownApproach(s.to_string()))
    }
}

impl Serialize for Approach {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Approach {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproachConfig {
    pub approach: Approach,
    /// C values searched for SVM approaches; ignored by language models.
    pub c_grid: Vec<f64>,
    pub seed: u64,
    pub tol: f64,
}

impl ApproachConfig {
    pub fn new(approach: Approach, seed: u64) -> Self {
        Self { approach, c_grid: DEFAULT_C_GRID.to_vec(), seed, tol: DEFAULT_TOL }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.c_grid.is_empty() {
            return Err(ExperimentError::InvalidConfig("C grid is empty"));
        }
        if self.c_grid.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return Err(ExperimentError::InvalidConfig("C values must be positive"));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(ExperimentError::InvalidConfig("tolerance must be positive"));
        }
        Ok(())
    }

    pub fn content_hash(&self) -> String {
        let mut h = FieldHasher::new();
        h.str(self.approach.name()).u64(self.seed).u64(self.tol.to_bits());
        for c in &self.c_grid {
            h.u64(c.to_bits());
        }
        h.finish_hex()
    }
}

/// Corpus, folds and optional resources, with every review tokenized once.
pub struct CvData<'a> {
    pub corpus: &'a Corpus,
    pub plan: &'a FoldPlan,
    pub lexicon: Option<&'a Lexicon>,
    pub tags: Option<&'a dyn TagProvider>,
    seqs: Vec<TokenSeq>,
    folds: Vec<usize>,
}

impl<'a> CvData<'a> {
    pub fn new(
        corpus: &'a Corpus,
        plan: &'a FoldPlan,
        lexicon: Option<&'a Lexicon>,
        tags: Option<&'a dyn TagProvider>,
    ) -> Result<Self, ExperimentError> {
        if !plan.covers(corpus) {
            return Err(ExperimentError::PlanMismatch);
        }
        let seqs = corpus.reviews().iter().map(|r| tokenize_seq(&r.id, &r.text)).collect();
        let folds = plan.review_folds(corpus);
        Ok(Self { corpus, plan, lexicon, tags, seqs, folds })
    }

    pub fn seqs(&self) -> &[TokenSeq] {
        &self.seqs
    }

    /// Review indices whose fold is in `folds`.
    pub fn indices_in(&self, folds: &[usize]) -> Vec<usize> {
        (0..self.seqs.len()).filter(|&i| folds.contains(&self.folds[i])).collect()
    }

    fn label(&self, i: usize) -> Label {
        self.corpus.reviews()[i].label
    }

    fn check_classes(&self, idx: &[usize], fold: usize, part: &'static str) -> Result<(), ExperimentError> {
        let truthful = idx.iter().filter(|&&i| self.label(i) == Label::Truthful).count();
        if truthful == 0 || truthful == idx.len() {
            return Err(ExperimentError::SingleClassFold { fold, part });
        }
        Ok(())
    }
}

/// A feature map fitted on training reviews.
struct Featurizer {
    space: FeatureSpace,
}

impl Featurizer {
    fn fit(data: &CvData<'_>, approach: Approach, train: &[usize]) -> Result<Self, ExperimentError> {
        let ngram_space = |order| build_ngram_space(train.iter().map(|&i| &data.seqs[i]), order);
        let space = match approach {
            Approach::PosSvm => pos_space(PENN_TAGSET),
            Approach::LexiconSvm => lexicon_space(data.lexicon.ok_or(ExperimentError::MissingLexicon)?)?,
            Approach::LexiconBigramsSvm => {
                let lex = data.lexicon.ok_or(ExperimentError::MissingLexicon)?;
                let ngrams = ngram_space(2);
                let ngram_names = ngrams.block(NGRAM_BLOCK).map(|b| b.names().to_vec()).unwrap_or_default();
                FeatureSpace::builder()
                    .block(LEXICON_BLOCK, lex.categories().iter().map(|c| c.name.clone()))?
                    .block(NGRAM_BLOCK, ngram_names)?
                    .build()
            }
            a => ngram_space(a.ngram_order().expect("n-gram approach")),
        };
        Ok(Self { space })
    }

    fn vector(&self, data: &CvData<'_>, approach: Approach, i: usize) -> Result<SparseVector, ExperimentError> {
        let seq = &data.seqs[i];
        Ok(match approach {
            Approach::PosSvm => {
                let id = &data.corpus.reviews()[i].id;
                let tagged = data
                    .tags
                    .and_then(|t| t.tagged(id))
                    .ok_or_else(|| ExperimentError::MissingTags(id.clone()))?;
                pos_vector(tagged, &self.space)
                    .map_err(|source| ExperimentError::Tagged { id: id.clone(), source })?
                    .vector
            }
            Approach::LexiconSvm => {
                lexicon_vector(seq, data.lexicon.ok_or(ExperimentError::MissingLexicon)?, &self.space)?
            }
            Approach::LexiconBigramsSvm => {
                let lex = lexicon_vector(seq, data.lexicon.ok_or(ExperimentError::MissingLexicon)?, &self.space)?;
                let ngrams = ngram_vector(seq, &self.space, 2)?;
                combine_blocks(&[lex, ngrams])?
            }
            a => ngram_vector(seq, &self.space, a.ngram_order().expect("n-gram approach"))?,
        })
    }
}

/// A model fitted on one training set, able to score any review.
enum Fitted {
    Svm { featurizer: Featurizer, model: LinearModel },
    Lm(ClassLMPair),
}

impl Fitted {
    fn train(data: &CvData<'_>, config: &ApproachConfig, train: &[usize], c: Option<f64>, seed_label: &str) -> Result<Self, ExperimentError> {
        let approach = config.approach;
        if approach.is_language_model() {
            let order = approach.ngram_order().expect("language-model approach has an order");
            let docs: Vec<TokenSeq> = train.iter().map(|&i| data.seqs[i].clone()).collect();
            let vocab = build_vocab(&docs, 1);
            let (t, d): (Vec<TokenSeq>, Vec<TokenSeq>) = {
                let mut t = Vec::new();
                let mut d = Vec::new();
                for (&i, s) in train.iter().zip(docs) {
                    match data.label(i) {
                        Label::Truthful => t.push(s),
                        Label::Deceptive => d.push(s),
                    }
                }
                (t, d)
            };
            return Ok(Fitted::Lm(ClassLMPair::train(&t, &d, order, &vocab)?));
        }
        let featurizer = Featurizer::fit(data, approach, train)?;
        let mut examples = Vec::with_capacity(train.len());
        for &i in train {
            examples.push((featurizer.vector(data, approach, i)?, data.label(i)));
        }
        let params = SvmParams {
            c: c.expect("SVM approaches carry a C"),
            tol: config.tol,
            seed: derive_seed(config.seed, seed_label),
            max_epochs: crate::svm::DEFAULT_MAX_EPOCHS,
        };
        let model = train_linear_svm(&examples, featurizer.space.len(), &params)?;
        Ok(Fitted::Svm { featurizer, model })
    }

    /// (predicted label, score); positive scores lean truthful.
    fn predict(&self, data: &CvData<'_>, approach: Approach, i: usize) -> Result<(Label, f64), ExperimentError> {
        match self {
            Fitted::Svm { featurizer, model } => Ok(model.predict(&featurizer.vector(data, approach, i)?)?),
            Fitted::Lm(pair) => {
                let d = classify_ml(pair, &data.seqs[i]);
                Ok((d.label, d.margin))
            }
        }
    }
}

/// Hyperparameters picked for one outer fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    /// None for approaches without a tuned parameter.
    pub c: Option<f64>,
    /// Mean inner accuracy (percent) per grid value, in grid order.
    pub inner_accuracy: Vec<(f64, f64)>,
}

/// Leave-one-fold-out CV over `train_folds`; picks the C with the highest
/// mean accuracy, the smallest C on ties.
pub fn inner_select(data: &CvData<'_>, train_folds: &[usize], config: &ApproachConfig) -> Result<Selection, ExperimentError> {
    config.validate()?;
    if config.approach.is_language_model() {
        return Ok(Selection { c: None, inner_accuracy: Vec::new() });
    }
    if config.c_grid.len() == 1 {
        return Ok(Selection { c: Some(config.c_grid[0]), inner_accuracy: Vec::new() });
    }
    if train_folds.len() < 2 {
        return Err(ExperimentError::InvalidConfig("inner CV needs at least two folds"));
    }
    let mut sums = alloc::vec![0.0; config.c_grid.len()];
    for &held in train_folds {
        let rest: Vec<usize> = train_folds.iter().copied().filter(|&f| f != held).collect();
        let train = data.indices_in(&rest);
        let test = data.indices_in(&[held]);
        data.check_classes(&train, held, "inner training")?;
        if test.is_empty() {
            return Err(ExperimentError::SingleClassFold { fold: held, part: "inner test" });
        }
        let featurizer = Featurizer::fit(data, config.approach, &train)?;
        let mut examples = Vec::with_capacity(train.len());
        for &i in &train {
            examples.push((featurizer.vector(data, config.approach, i)?, data.label(i)));
        }
        let mut test_vecs = Vec::with_capacity(test.len());
        for &i in &test {
            test_vecs.push((featurizer.vector(data, config.approach, i)?, data.label(i)));
        }
        for (ci, &c) in config.c_grid.iter().enumerate() {
            let label = format!("inner/{}/{}/{}", train_folds_key(train_folds), held, ci);
            let params = SvmParams {
                c,
                tol: config.tol,
                seed: derive_seed(config.seed, &label),
                max_epochs: crate::svm::DEFAULT_MAX_EPOCHS,
            };
            let model = train_linear_svm(&examples, featurizer.space.len(), &params)?;
            let mut correct = 0usize;
            for (x, y) in &test_vecs {
                if model.predict(x)?.0 == *y {
                    correct += 1;
                }
            }
            sums[ci] += 100.0 * correct as f64 / test.len() as f64;
        }
    }
    let k = train_folds.len() as f64;
    let inner_accuracy: Vec<(f64, f64)> = config.c_grid.iter().zip(&sums).map(|(&c, &s)| (c, s / k)).collect();
    let mut best = inner_accuracy[0];
    for &(c, acc) in &inner_accuracy[1..] {
        if acc > best.1 || (acc == best.1 && c < best.0) {
            best = (c, acc);
        }
    }
    Ok(Selection { c: Some(best.0), inner_accuracy })
}

fn train_folds_key(folds: &[usize]) -> String {
    let parts: Vec<String> = folds.iter().map(|f| f.to_string()).collect();
    parts.join(",")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemPrediction {
    pub id: String,
    pub fold: usize,
    pub truth: Label,
    pub predicted: Label,
    pub score: f64,
}

impl ItemPrediction {
    pub fn correct(&self) -> bool {
        self.truth == self.predicted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub selection: Selection,
    pub counts: ConfusionCounts,
    pub train_size: usize,
    pub test_size: usize,
    /// Digest of the ids of every review that fed feature construction.
    pub train_ids_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub corpus_hash: String,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub approach: Approach,
    pub folds: Vec<FoldResult>,
    pub aggregate: ConfusionCounts,
    pub metrics: MetricsReport,
    pub predictions: Vec<ItemPrediction>,
    pub provenance: Provenance,
}

/// Final per-fold SVM models, kept for weight analysis.
pub struct FoldModel {
    pub fold: usize,
    pub space: FeatureSpace,
    pub model: LinearModel,
}

pub struct CvOutcome {
    pub report: EvalReport,
    pub models: Vec<FoldModel>,
}

fn ids_hash(data: &CvData<'_>, idx: &[usize]) -> String {
    let ids: BTreeSet<&str> = idx.iter().map(|&i| data.corpus.reviews()[i].id.as_str()).collect();
    let mut h = FieldHasher::new();
    for id in ids {
        h.str(id);
    }
    h.finish_hex()
}

/// Run the full nested protocol for one approach.
pub fn nested_cv(data: &CvData<'_>, config: &ApproachConfig) -> Result<CvOutcome, ExperimentError> {
    config.validate()?;
    if config.approach.needs_lexicon() && data.lexicon.is_none() {
        return Err(ExperimentError::MissingLexicon);
    }
    let k = data.plan.k;
    let mut folds = Vec::with_capacity(k);
    let mut predictions = Vec::new();
    let mut models = Vec::new();
    for f in 0..k {
        let train_folds: Vec<usize> = (0..k).filter(|&g| g != f).collect();
        let train = data.indices_in(&train_folds);
        let test = data.indices_in(&[f]);
        data.check_classes(&train, f, "training")?;
        data.check_classes(&test, f, "test")?;
        let test_ids: BTreeSet<&str> = test.iter().map(|&i| data.corpus.reviews()[i].id.as_str()).collect();
        if train.iter().any(|&i| test_ids.contains(data.corpus.reviews()[i].id.as_str())) {
            return Err(ExperimentError::Leakage(f));
        }

        let selection = inner_select(data, &train_folds, config)?;
        let fitted = Fitted::train(data, config, &train, selection.c, &format!("outer/{f}"))?;
        let mut counts = ConfusionCounts::default();
        for &i in &test {
            let (predicted, score) = fitted.predict(data, config.approach, i)?;
            let r = &data.corpus.reviews()[i];
            counts.record(r.label, predicted);
            predictions.push(ItemPrediction { id: r.id.clone(), fold: f, truth: r.label, predicted, score });
        }
        folds.push(FoldResult {
            fold: f,
            selection,
            counts,
            train_size: train.len(),
            test_size: test.len(),
            train_ids_hash: ids_hash(data, &train),
        });
        if let Fitted::Svm { featurizer, model } = fitted {
            models.push(FoldModel { fold: f, space: featurizer.space, model });
        }
    }
    predictions.sort_by(|a, b| a.id.cmp(&b.id));
    let (aggregate, metrics) = aggregate_report(&folds, k)?;
    let report = EvalReport {
        approach: config.approach,
        folds,
        aggregate,
        metrics,
        predictions,
        provenance: Provenance {
            config_hash: config.content_hash(),
            corpus_hash: data.corpus.content_hash(),
            seed: config.seed,
        },
    };
    Ok(CvOutcome { report, models })
}

/// Sum fold counts and compute micro-averaged metrics.
pub fn aggregate_report(folds: &[FoldResult], expected_folds: usize) -> Result<(ConfusionCounts, MetricsReport), ExperimentError> {
    if folds.len() != expected_folds {
        return Err(ExperimentError::FoldCount { expected: expected_folds, got: folds.len() });
    }
    let total = folds.iter().fold(ConfusionCounts::default(), |acc, f| acc + f.counts);
    let metrics = micro_metrics(&total)?;
    Ok((total, metrics))
}

/// Plain-text table with one row per system: accuracy, then truthful and
/// deceptive precision, recall and F1.
pub fn render_table(rows: &[(&str, &MetricsReport)]) -> String {
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0).max(8);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<width$}  {:>8}  {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}\n",
        "", "", "Truthful", "", "", "Deceptive", "", ""
    ));
    out.push_str(&format!(
        "{:<width$}  {:>8}  {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}\n",
        "Approach", "Accuracy", "P", "R", "F", "P", "R", "F"
    ));
    for (name, m) in rows {
        out.push_str(&format!(
            "{:<width$}  {:>7.1}%  {:>6.1} {:>6.1} {:>6.1}  {:>6.1} {:>6.1} {:>6.1}\n",
            name,
            m.accuracy.rounded(),
            m.truthful.precision.rounded(),
            m.truthful.recall.rounded(),
            m.truthful.f1.rounded(),
            m.deceptive.precision.rounded(),
            m.deceptive.recall.rounded(),
            m.deceptive.f1.rounded(),
        ));
    }
    out
}

/// Sign test on paired per-item correctness; `Sided::Greater` asks whether
/// `a` is right more often than `b`.
pub fn compare_approaches(a: &[ItemPrediction], b: &[ItemPrediction], sided: Sided) -> Result<SignTest, ExperimentError> {
    let index: BTreeMap<&str, &ItemPrediction> = b.iter().map(|p| (p.id.as_str(), p)).collect();
    if index.len() != a.len() || b.len() != a.len() {
        return Err(ExperimentError::ItemMismatch);
    }
    let mut ca = Vec::with_capacity(a.len());
    let mut cb = Vec::with_capacity(a.len());
    for p in a {
        let q = index.get(p.id.as_str()).ok_or(ExperimentError::ItemMismatch)?;
        if q.truth != p.truth {
            return Err(ExperimentError::ItemMismatch);
        }
        ca.push(p.correct());
        cb.push(q.correct());
    }
    Ok(sign_test(&ca, &cb, sided)?)
}
