use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{FeatureError, FeatureSpace, SparseVector};

pub const POS_BLOCK: &str = "pos";

/// Penn Treebank tags, including the punctuation tags.
pub const PENN_TAGSET: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP", "NNPS", "PDT",
    "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN", "VBP",
    "VBZ", "WDT", "WP", "WP$", "WRB", "#", "$", "''", "``", ",", "-LRB-", "-RRB-", ".", ":",
];

/// (token, tag) pairs for one document.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TaggedSeq {
    pub pairs: Vec<(String, String)>,
}

/// Source of POS annotations for reviews, keyed by review id.
pub trait TagProvider {
    fn tagged(&self, review_id: &str) -> Option<&TaggedSeq>;
}

impl TagProvider for BTreeMap<String, TaggedSeq> {
    fn tagged(&self, review_id: &str) -> Option<&TaggedSeq> {
        self.get(review_id)
    }
}

pub fn pos_space(tagset: &[&str]) -> FeatureSpace {
    FeatureSpace::builder()
        .block(POS_BLOCK, tagset.iter().copied())
        .expect("tagset has unique tags")
        .build()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PosFeatures {
    /// Relative frequency per tag, in tagset order; sums to 1.
    pub relative: Vec<f64>,
    /// The same frequencies scaled to unit length.
    pub vector: SparseVector,
}

/// Relative frequency of each tag in `tagged`.
pub fn pos_vector(tagged: &TaggedSeq, space: &FeatureSpace) -> Result<PosFeatures, FeatureError> {
    if tagged.pairs.is_empty() {
        return Err(FeatureError::EmptyTagged);
    }
    let block = space.block(POS_BLOCK).ok_or(FeatureError::MissingBlock(POS_BLOCK))?;
    let mut counts = alloc::vec![0usize; block.len()];
    for (_, tag) in &tagged.pairs {
        let idx = block.index(tag).ok_or_else(|| FeatureError::UnknownTag(tag.clone()))?;
        counts[(idx - block.start) as usize] += 1;
    }
    let total = tagged.pairs.len() as f64;
    let relative: Vec<f64> = counts.iter().map(|&c| c as f64 / total).collect();
    let vector = SparseVector::from_pairs(
        space.id(),
        relative.iter().enumerate().map(|(i, &v)| (block.start + i as u32, v)),
    )
    .normalized();
    Ok(PosFeatures { relative, vector })
}
