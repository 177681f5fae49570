use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;

use super::{FeatureError, FeatureSpace, SparseVector};
use crate::textproc::{ngram_name, ngrams, TokenSeq};

pub const NGRAM_BLOCK: &str = "ngrams";

/// Feature space of every n-gram (orders 1..=max_order, no markers) seen in
/// the training documents, names sorted lexicographically.
pub fn build_ngram_space<'a, I>(train_docs: I, max_order: usize) -> FeatureSpace
where
    I: IntoIterator<Item = &'a TokenSeq>,
{
    let mut names: BTreeSet<String> = BTreeSet::new();
    for doc in train_docs {
        for n in 1..=max_order {
            for g in ngrams(&doc.tokens, n, false) {
                names.insert(ngram_name(&g));
            }
        }
    }
    FeatureSpace::builder()
        .block(NGRAM_BLOCK, names)
        .expect("set has unique names")
        .build()
}

/// Raw counts of the in-space n-grams of `seq`, keyed by global index.
pub fn ngram_counts(seq: &TokenSeq, space: &FeatureSpace, max_order: usize) -> Result<BTreeMap<u32, f64>, FeatureError> {
    let block = space.block(NGRAM_BLOCK).ok_or(FeatureError::MissingBlock(NGRAM_BLOCK))?;
    let mut counts = BTreeMap::new();
    let mut name = String::new();
    for n in 1..=max_order {
        for g in ngrams(&seq.tokens, n, false) {
            name.clear();
            for (i, t) in g.iter().enumerate() {
                if i > 0 {
                    name.push('_');
                }
                name.push_str(t);
            }
            if let Some(idx) = block.index(&name) {
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
    }
    Ok(counts)
}

/// Unit-length vector of n-gram counts. Out-of-space n-grams are dropped;
/// a document with none left yields the zero vector.
pub fn ngram_vector(seq: &TokenSeq, space: &FeatureSpace, max_order: usize) -> Result<SparseVector, FeatureError> {
    let counts = ngram_counts(seq, space, max_order)?;
    Ok(SparseVector::from_pairs(space.id(), counts).normalized())
}
