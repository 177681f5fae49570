//! Interpolated Kneser-Ney n-gram language models and the class-conditional
//! likelihood decision built on them.
//!
//! Sequences are padded with `order − 1` start markers and one end marker.
//! The highest order uses raw counts; every lower order uses continuation
//! counts (the number of distinct left extensions of an n-gram). Each order
//! has a single absolute discount `D = n1 / (n1 + 2 n2)` estimated from its
//! own counts-of-counts. The recursion bottoms out in the uniform
//! distribution over the predictable vocabulary (everything except the start
//! marker), which is what gives unseen and unknown tokens nonzero mass.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::label::Label;
use crate::math;
use crate::textproc::{TokenSeq, Vocabulary};

pub const FORMAT_VERSION: u32 = 1;
const FALLBACK_DISCOUNT: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LmError {
    #[error("n-gram order must be at least 1")]
    ZeroOrder,
    #[error("no training documents")]
    NoDocuments,
    #[error("no usable {0}-gram windows in the training documents")]
    NoWindows(usize),
    #[error("class models differ in {0}")]
    MismatchedModels(&'static str),
    #[error("class prior must be positive and sum to 1, got ({0}, {1})")]
    InvalidPrior(f64, f64),
    #[error("unsupported model format version {0}")]
    UnsupportedVersion(u32),
    #[error("model data is inconsistent: {0}")]
    Corrupt(&'static str),
}

#[derive(Debug, Clone, Default, PartialEq)]
struct ContextEntry {
    total: u64,
    counts: BTreeMap<u32, u64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
struct Level {
    contexts: BTreeMap<Vec<u32>, ContextEntry>,
}

impl Level {
    fn add(&mut self, context: &[u32], word: u32, by: u64) {
        let entry = match self.contexts.get_mut(context) {
            Some(e) => e,
            None => self.contexts.entry(context.to_vec()).or_default(),
        };
        entry.total += by;
        *entry.counts.entry(word).or_insert(0) += by;
    }

    /// (n1, n2): number of n-grams with count exactly 1 and exactly 2.
    fn counts_of_counts(&self) -> (u64, u64) {
        let mut n1 = 0;
        let mut n2 = 0;
        for e in self.contexts.values() {
            for &c in e.counts.values() {
                match c {
                    1 => n1 += 1,
                    2 => n2 += 1,
                    _ => {}
                }
            }
        }
        (n1, n2)
    }
}

/// An interpolated Kneser-Ney language model over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct NgramLM {
    order: usize,
    vocab: Vocabulary,
    /// `levels[k - 1]` holds the order-k tables.
    levels: Vec<Level>,
    discounts: Vec<f64>,
    discount_fallback: Vec<bool>,
}

/// Per-order discount estimate from counts-of-counts.
pub fn kn_discount(n1: u64, n2: u64) -> Option<f64> {
    let denom = n1 + 2 * n2;
    if denom == 0 {
        None
    } else {
        Some(n1 as f64 / denom as f64)
    }
}

fn padded_ids(vocab: &Vocabulary, tokens: &[String], order: usize) -> Vec<u32> {
    let mut ids = Vec::with_capacity(tokens.len() + order);
    ids.extend(core::iter::repeat(Vocabulary::START_ID).take(order - 1));
    ids.extend(tokens.iter().map(|t| vocab.index_or_unknown(t)));
    ids.push(Vocabulary::END_ID);
    ids
}

/// Train an interpolated Kneser-Ney model of the given order.
///
/// Tokens missing from `vocab` are counted as the unknown marker.
pub fn train_kn(docs: &[TokenSeq], order: usize, vocab: &Vocabulary) -> Result<NgramLM, LmError> {
    if order == 0 {
        return Err(LmError::ZeroOrder);
    }
    if docs.is_empty() {
        return Err(LmError::NoDocuments);
    }
    let mut levels: Vec<Level> = (0..order).map(|_| Level::default()).collect();
    let mut windows = 0usize;
    for doc in docs {
        let ids = padded_ids(vocab, &doc.tokens, order);
        for w in ids.windows(order) {
            levels[order - 1].add(&w[..order - 1], w[order - 1], 1);
            windows += 1;
        }
    }
    if windows == 0 {
        return Err(LmError::NoWindows(order));
    }
    // Continuation counts: each distinct (k+1)-gram type contributes one
    // left extension to its k-suffix.
    for k in (1..order).rev() {
        let (lower, upper) = levels.split_at_mut(k);
        let target = &mut lower[k - 1];
        for (ctx, entry) in &upper[0].contexts {
            for &w in entry.counts.keys() {
                target.add(&ctx[1..], w, 1);
            }
        }
    }
    let mut discounts = Vec::with_capacity(order);
    let mut discount_fallback = Vec::with_capacity(order);
    for level in &levels {
        let (n1, n2) = level.counts_of_counts();
        match kn_discount(n1, n2) {
            Some(d) => {
                discounts.push(d);
                discount_fallback.push(false);
            }
            None => {
                discounts.push(FALLBACK_DISCOUNT);
                discount_fallback.push(true);
            }
        }
    }
    Ok(NgramLM {
        order,
        vocab: vocab.clone(),
        levels,
        discounts,
        discount_fallback,
    })
}

impl NgramLM {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    /// Discount per order, lowest order first.
    pub fn discounts(&self) -> &[f64] {
        &self.discounts
    }

    /// True when some order fell back to the default discount because it had
    /// no singletons or doubletons.
    pub fn has_discount_warning(&self) -> bool {
        self.discount_fallback.iter().any(|&f| f)
    }

    /// Size of the event space: the vocabulary minus the start marker.
    pub fn predictable_size(&self) -> usize {
        self.vocab.len() - 1
    }

    /// Ids that can be predicted (everything but the start marker).
    pub fn predictable_ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.vocab.len() as u32).filter(|&i| i != Vocabulary::START_ID)
    }

    /// P(word | history), using the last `order − 1` ids of `history`
    /// (shorter histories use correspondingly lower orders).
    pub fn prob(&self, history: &[u32], word: u32) -> f64 {
        let k = (history.len() + 1).min(self.order);
        self.prob_at(k, history, word)
    }

    fn prob_at(&self, k: usize, history: &[u32], word: u32) -> f64 {
        if k == 0 {
            return 1.0 / self.predictable_size() as f64;
        }
        let lower = self.prob_at(k - 1, history, word);
        let ctx = &history[history.len() - (k - 1)..];
        match self.levels[k - 1].contexts.get(ctx) {
            None => lower,
            Some(e) => {
                let d = self.discounts[k - 1];
                let c = e.counts.get(&word).copied().unwrap_or(0) as f64;
                let total = e.total as f64;
                ((c - d).max(0.0) + d * e.counts.len() as f64 * lower) / total
            }
        }
    }

    /// Contexts with training counts, per order (lowest first). The empty
    /// context of order 1 is always present.
    pub fn observed_contexts(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for level in &self.levels {
            out.extend(level.contexts.keys().cloned());
        }
        if !out.iter().any(|c| c.is_empty()) {
            out.push(Vec::new());
        }
        out
    }

    /// Natural-log probability of the marker-padded sequence.
    pub fn logprob(&self, seq: &TokenSeq) -> f64 {
        self.logprob_tokens(&seq.tokens)
    }

    pub fn logprob_tokens(&self, tokens: &[String]) -> f64 {
        let ids = padded_ids(&self.vocab, tokens, self.order);
        let mut total = 0.0;
        for i in (self.order - 1)..ids.len() {
            let history = &ids[i + 1 - self.order..i];
            total += math::ln(self.prob(history, ids[i]));
        }
        total
    }

    pub fn to_data(&self) -> LmData {
        LmData {
            version: FORMAT_VERSION,
            order: self.order,
            vocab: self.vocab.tokens().to_vec(),
            vocab_hash: self.vocab.content_hash(),
            discounts: self.discounts.clone(),
            discount_fallback: self.discount_fallback.clone(),
            levels: self
                .levels
                .iter()
                .map(|level| {
                    level
                        .contexts
                        .iter()
                        .map(|(ctx, e)| ContextRecord {
                            context: ctx.clone(),
                            counts: e.counts.iter().map(|(&w, &c)| (w, c)).collect(),
                        })
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_data(data: LmData) -> Result<NgramLM, LmError> {
        if data.version != FORMAT_VERSION {
            return Err(LmError::UnsupportedVersion(data.version));
        }
        if data.order == 0 || data.levels.len() != data.order || data.discounts.len() != data.order {
            return Err(LmError::Corrupt("order does not match table count"));
        }
        let vocab = Vocabulary::from_tokens(data.vocab.into_iter().skip(3));
        if vocab.content_hash() != data.vocab_hash {
            return Err(LmError::Corrupt("vocabulary hash mismatch"));
        }
        let mut levels = Vec::with_capacity(data.order);
        for (k, records) in data.levels.into_iter().enumerate() {
            let mut level = Level::default();
            for rec in records {
                if rec.context.len() != k {
                    return Err(LmError::Corrupt("context length does not match order"));
                }
                for (w, c) in rec.counts {
                    if w as usize >= vocab.len() {
                        return Err(LmError::Corrupt("token id out of range"));
                    }
                    level.add(&rec.context, w, c);
                }
            }
            levels.push(level);
        }
        let discount_fallback = if data.discount_fallback.len() == data.order {
            data.discount_fallback
        } else {
            alloc::vec![false; data.order]
        };
        Ok(NgramLM {
            order: data.order,
            vocab,
            levels,
            discounts: data.discounts,
            discount_fallback,
        })
    }
}

/// Serializable form of an [`NgramLM`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmData {
    pub version: u32,
    pub order: usize,
    pub vocab: Vec<String>,
    pub vocab_hash: String,
    pub discounts: Vec<f64>,
    #[serde(default)]
    pub discount_fallback: Vec<bool>,
    /// Per order, lowest first.
    pub levels: Vec<Vec<ContextRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextRecord {
    pub context: Vec<u32>,
    pub counts: Vec<(u32, u64)>,
}

/// Truthful and deceptive models over one vocabulary, with a class prior.
#[derive(Debug, Clone)]
pub struct ClassLMPair {
    pub truthful: NgramLM,
    pub deceptive: NgramLM,
    /// (truthful, deceptive).
    pub prior: (f64, f64),
}

impl ClassLMPair {
    pub fn new(truthful: NgramLM, deceptive: NgramLM, prior: (f64, f64)) -> Result<Self, LmError> {
        if truthful.order != deceptive.order {
            return Err(LmError::MismatchedModels("order"));
        }
        if truthful.vocab != deceptive.vocab {
            return Err(LmError::MismatchedModels("vocabulary"));
        }
        let (a, b) = prior;
        if !(a > 0.0 && b > 0.0) || (a + b - 1.0).abs() > 1e-12 {
            return Err(LmError::InvalidPrior(a, b));
        }
        Ok(Self { truthful, deceptive, prior })
    }

    /// Train both class models on a shared vocabulary with a uniform prior.
    pub fn train(truthful: &[TokenSeq], deceptive: &[TokenSeq], order: usize, vocab: &Vocabulary) -> Result<Self, LmError> {
        let t = train_kn(truthful, order, vocab)?;
        let d = train_kn(deceptive, order, vocab)?;
        Self::new(t, d, (0.5, 0.5))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmDecision {
    pub label: Label,
    /// Log-odds of truthful over deceptive (prior included).
    pub margin: f64,
    pub truthful_logprob: f64,
    pub deceptive_logprob: f64,
}

/// Decide by log prior plus log likelihood; exact ties go to truthful.
///
/// With equal priors the prior terms cancel and are skipped, so the decision
/// is exactly the pure likelihood comparison.
pub fn classify_ml(pair: &ClassLMPair, seq: &TokenSeq) -> LmDecision {
    let t = pair.truthful.logprob(seq);
    let d = pair.deceptive.logprob(seq);
    let margin = if pair.prior.0 == pair.prior.1 {
        t - d
    } else {
        (math::ln(pair.prior.0) + t) - (math::ln(pair.prior.1) + d)
    };
    LmDecision {
        label: Label::from_margin(margin),
        margin,
        truthful_logprob: t,
        deceptive_logprob: d,
    }
}

/// Decision with the prior always included, i.e. the full naive Bayes rule.
pub fn classify_with_prior(pair: &ClassLMPair, seq: &TokenSeq) -> Label {
    let t = math::ln(pair.prior.0) + pair.truthful.logprob(seq);
    let d = math::ln(pair.prior.1) + pair.deceptive.logprob(seq);
    if t >= d {
        Label::Truthful
    } else {
        Label::Deceptive
    }
}
