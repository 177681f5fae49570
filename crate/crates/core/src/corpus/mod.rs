//! Reviews, corpora and hotel-blocked fold plans, plus the statistics used
//! when assembling a length-matched truthful/deceptive dataset.

mod lengths;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::hashing::{derive_seed, FieldHasher};
use crate::label::Label;
use crate::math;
use crate::textproc;

pub use lengths::{
    fit_truncated_lognormal, ks_distance, sample_length_matched, LogNormalFit, TruncLogNormalParams,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CorpusError {
    #[error("corpus is empty")]
    Empty,
    #[error("duplicate review id {0:?}")]
    DuplicateId(String),
    #[error("review {0:?} has an empty hotel id")]
    EmptyHotel(String),
    #[error("review {id:?}: char_length {recorded} does not match text length {actual}")]
    LengthMismatch { id: String, recorded: usize, actual: usize },
    #[error("{k} folds do not evenly divide {hotels} hotels")]
    UnevenFolds { k: usize, hotels: usize },
    #[error("hotel {0:?} has reviews assigned to different folds")]
    InconsistentFold(String),
    #[error("review {id:?} has fold {fold}, outside [0, {k})")]
    FoldOutOfRange { id: String, fold: usize, k: usize },
    #[error("fold labels must be given for every review or for none")]
    PartialFolds,
    #[error("fold {0} has no hotels")]
    EmptyFold(usize),
    #[error("hotel {hotel:?} has {available} eligible candidates, {needed} needed")]
    InsufficientCandidates { hotel: String, needed: usize, available: usize },
    #[error("length {value} is below the truncation point {truncation_point}")]
    BelowTruncation { value: f64, truncation_point: f64 },
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("invalid distribution parameters: {0}")]
    InvalidParams(&'static str),
    #[error("log-normal fit did not converge after {iterations} iterations (mu={mu}, sigma={sigma}, loglik={log_likelihood})")]
    NonConvergence { iterations: usize, mu: f64, sigma: f64, log_likelihood: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    #[default]
    Positive,
    Negative,
}

/// One opinion document with its provenance metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub hotel: String,
    #[serde(default)]
    pub polarity: Polarity,
    /// Length of `text` in Unicode scalar values.
    pub char_length: usize,
    /// Token count under [`textproc::tokenize`].
    pub word_length: usize,
    #[serde(default)]
    pub authoring_minutes: Option<f64>,
    #[serde(default)]
    pub author_id: Option<String>,
    #[serde(default)]
    pub star_rating: Option<u8>,
    #[serde(default)]
    pub is_first_time_author: Option<bool>,
    /// Fold index carried by the source data, 0-based.
    #[serde(default)]
    pub fold: Option<usize>,
}

impl Review {
    pub fn new(id: impl Into<String>, text: impl Into<String>, label: Label, hotel: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            char_length: text.chars().count(),
            word_length: textproc::tokenize(&text).len(),
            text,
            label,
            hotel: hotel.into(),
            polarity: Polarity::Positive,
            authoring_minutes: None,
            author_id: None,
            star_rating: None,
            is_first_time_author: None,
            fold: None,
        }
    }

    fn validate(&self) -> Result<(), CorpusError> {
        if self.hotel.is_empty() {
            return Err(CorpusError::EmptyHotel(self.id.clone()));
        }
        let actual = self.text.chars().count();
        if actual != self.char_length {
            return Err(CorpusError::LengthMismatch {
                id: self.id.clone(),
                recorded: self.char_length,
                actual,
            });
        }
        Ok(())
    }
}

/// A validated collection of reviews with unique ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    reviews: Vec<Review>,
    hotels: BTreeSet<String>,
}

impl Corpus {
    pub fn new(reviews: Vec<Review>) -> Result<Self, CorpusError> {
        if reviews.is_empty() {
            return Err(CorpusError::Empty);
        }
        let mut ids = BTreeSet::new();
        for r in &reviews {
            r.validate()?;
            if !ids.insert(r.id.as_str()) {
                return Err(CorpusError::DuplicateId(r.id.clone()));
            }
        }
        let hotels = reviews.iter().map(|r| r.hotel.clone()).collect();
        Ok(Self { reviews, hotels })
    }

    pub fn reviews(&self) -> &[Review] {
        &self.reviews
    }

    pub fn hotels(&self) -> &BTreeSet<String> {
        &self.hotels
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    /// (truthful, deceptive) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let t = self.reviews.iter().filter(|r| r.label == Label::Truthful).count();
        (t, self.reviews.len() - t)
    }

    /// Per-hotel (truthful, deceptive) counts.
    pub fn hotel_counts(&self) -> BTreeMap<&str, (usize, usize)> {
        let mut out: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for r in &self.reviews {
            let e = out.entry(r.hotel.as_str()).or_default();
            match r.label {
                Label::Truthful => e.0 += 1,
                Label::Deceptive => e.1 += 1,
            }
        }
        out
    }

    /// Order-independent digest of ids, labels, hotels and texts.
    pub fn content_hash(&self) -> String {
        let mut sorted: Vec<&Review> = self.reviews.iter().collect();
        sorted.sort_by(|a, b| a.id.cmp(&b.id));
        let mut h = FieldHasher::new();
        for r in sorted {
            h.str(&r.id).str(r.label.as_str()).str(&r.hotel).str(&r.text);
        }
        h.finish_hex()
    }
}

/// Assignment of hotels to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignment: BTreeMap<String, usize>,
}

impl FoldPlan {
    pub fn fold_of(&self, hotel: &str) -> Option<usize> {
        self.assignment.get(hotel).copied()
    }

    pub fn hotels_in(&self, fold: usize) -> Vec<&str> {
        self.assignment
            .iter()
            .filter(|&(_, &f)| f == fold)
            .map(|(h, _)| h.as_str())
            .collect()
    }

    /// Indices into `corpus.reviews()` of the reviews in `fold`.
    pub fn members(&self, corpus: &Corpus, fold: usize) -> Vec<usize> {
        corpus
            .reviews()
            .iter()
            .enumerate()
            .filter(|(_, r)| self.fold_of(&r.hotel) == Some(fold))
            .map(|(i, _)| i)
            .collect()
    }

    /// Fold index of every review, in corpus order.
    pub fn review_folds(&self, corpus: &Corpus) -> Vec<usize> {
        corpus
            .reviews()
            .iter()
            .map(|r| self.fold_of(&r.hotel).expect("plan covers every hotel"))
            .collect()
    }

    pub fn covers(&self, corpus: &Corpus) -> bool {
        corpus.hotels().iter().all(|h| self.assignment.contains_key(h))
    }
}

/// Partition the corpus hotels into `k` folds.
///
/// Fold labels already present on the reviews are honored (and checked for
/// consistency); otherwise the sorted hotel list is shuffled with `seed` and
/// cut into `k` equal chunks.
pub fn assign_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldPlan, CorpusError> {
    let n_hotels = corpus.hotels().len();
    if k == 0 || n_hotels % k != 0 {
        return Err(CorpusError::UnevenFolds { k, hotels: n_hotels });
    }
    let labelled = corpus.reviews().iter().filter(|r| r.fold.is_some()).count();
    if labelled == corpus.len() {
        return plan_from_labels(corpus, k);
    }
    if labelled != 0 {
        return Err(CorpusError::PartialFolds);
    }

    let mut hotels: Vec<&String> = corpus.hotels().iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "folds"));
    hotels.shuffle(&mut rng);
    let per_fold = n_hotels / k;
    let assignment = hotels
        .into_iter()
        .enumerate()
        .map(|(i, h)| (h.clone(), i / per_fold))
        .collect();
    Ok(FoldPlan { k, assignment })
}

fn plan_from_labels(corpus: &Corpus, k: usize) -> Result<FoldPlan, CorpusError> {
    let mut assignment: BTreeMap<String, usize> = BTreeMap::new();
    for r in corpus.reviews() {
        let fold = r.fold.expect("checked by caller");
        if fold >= k {
            return Err(CorpusError::FoldOutOfRange { id: r.id.clone(), fold, k });
        }
        match assignment.get(&r.hotel) {
            Some(&f) if f != fold => return Err(CorpusError::InconsistentFold(r.hotel.clone())),
            Some(_) => {}
            None => {
                assignment.insert(r.hotel.clone(), fold);
            }
        }
    }
    for f in 0..k {
        if !assignment.values().any(|&v| v == f) {
            return Err(CorpusError::EmptyFold(f));
        }
    }
    Ok(FoldPlan { k, assignment })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterRule {
    StarRating,
    MinLength,
    FirstTimeAuthor,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleTally {
    pub rule: FilterRule,
    pub removed: usize,
    /// Reviews the rule could not be applied to for lack of metadata.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterTally {
    pub input: usize,
    pub retained: usize,
    /// In application order.
    pub rules: Vec<RuleTally>,
}

impl FilterTally {
    pub fn removed_by(&self, rule: FilterRule) -> usize {
        self.rules.iter().find(|t| t.rule == rule).map_or(0, |t| t.removed)
    }
}

/// Keep reviews with the required star rating, at least `min_chars`
/// characters, and a non-first-time author.
///
/// Rules are applied in that order and a review is charged to the first rule
/// that removes it. A review missing the metadata for a rule passes that rule
/// and is counted as skipped.
pub fn filter_candidates(reviews: &[Review], min_chars: usize, required_stars: u8) -> (Vec<Review>, FilterTally) {
    let mut tallies = [
        RuleTally { rule: FilterRule::StarRating, removed: 0, skipped: 0 },
        RuleTally { rule: FilterRule::MinLength, removed: 0, skipped: 0 },
        RuleTally { rule: FilterRule::FirstTimeAuthor, removed: 0, skipped: 0 },
    ];
    let mut kept = Vec::new();
    for r in reviews {
        let verdicts = [
            r.star_rating.map(|s| s == required_stars),
            Some(r.char_length >= min_chars),
            r.is_first_time_author.map(|first| !first),
        ];
        let mut pass = true;
        for (tally, verdict) in tallies.iter_mut().zip(verdicts) {
            match verdict {
                None => tally.skipped += 1,
                Some(true) => {}
                Some(false) => {
                    tally.removed += 1;
                    pass = false;
                    break;
                }
            }
        }
        if pass {
            kept.push(r.clone());
        }
    }
    let tally = FilterTally {
        input: reviews.len(),
        retained: kept.len(),
        rules: tallies.to_vec(),
    };
    (kept, tally)
}

/// count/min/max/mean/sample standard deviation of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `None` when fewer than two observations (n − 1 denominator).
    pub sd: Option<f64>,
}

impl Summary {
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = if values.len() >= 2 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            Some(math::sqrt(ss / (n - 1.0)))
        } else {
            None
        };
        Some(Summary {
            count: values.len(),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean,
            sd,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitGroup {
    pub count: usize,
    pub length: Option<Summary>,
    /// Word lengths, kept for follow-up tests between groups.
    #[serde(skip)]
    pub lengths: Vec<f64>,
}

/// Authoring-time and length statistics, overall and split by authoring time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub count: usize,
    pub split_at_minutes: f64,
    /// Over reviews that carry an authoring time.
    pub time: Option<Summary>,
    pub length: Summary,
    pub below: SplitGroup,
    pub at_or_above: SplitGroup,
}

pub fn descriptive_stats(reviews: &[Review], split_at_minutes: f64) -> Result<DescriptiveStats, CorpusError> {
    if reviews.is_empty() {
        return Err(CorpusError::Empty);
    }
    let times: Vec<f64> = reviews.iter().filter_map(|r| r.authoring_minutes).collect();
    let lengths: Vec<f64> = reviews.iter().map(|r| r.word_length as f64).collect();
    let group = |pred: &dyn Fn(f64) -> bool| {
        let lengths: Vec<f64> = reviews
            .iter()
            .filter(|r| r.authoring_minutes.is_some_and(pred))
            .map(|r| r.word_length as f64)
            .collect();
        SplitGroup {
            count: lengths.len(),
            length: Summary::of(&lengths),
            lengths,
        }
    };
    Ok(DescriptiveStats {
        count: reviews.len(),
        split_at_minutes,
        time: Summary::of(&times),
        length: Summary::of(&lengths).expect("nonempty"),
        below: group(&|t| t < split_at_minutes),
        at_or_above: group(&|t| t >= split_at_minutes),
    })
}
