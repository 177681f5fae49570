//! Feature extraction: n-gram counts, POS tag frequencies and lexicon
//! category rates, all as unit-normalized sparse vectors.

mod lexicon;
mod ngram;
mod pos;
mod sparse;

use alloc::string::String;

pub use lexicon::{lexicon_rates, lexicon_space, lexicon_vector, Category, Lexicon, LexiconError, LEXICON_BLOCK};
pub use ngram::{build_ngram_space, ngram_counts, ngram_vector, NGRAM_BLOCK};
pub use pos::{pos_space, pos_vector, PosFeatures, TagProvider, TaggedSeq, PENN_TAGSET, POS_BLOCK};
pub use sparse::{combine_blocks, Block, FeatureSpace, FeatureSpaceBuilder, SparseVector};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeatureError {
    #[error("no blocks to combine")]
    NoBlocks,
    #[error("vector belongs to space {got:#x}, expected {expected:#x}")]
    SpaceMismatch { expected: u64, got: u64 },
    #[error("blocks overlap in index range")]
    OverlappingBlocks,
    #[error("duplicate block {0:?}")]
    DuplicateBlock(String),
    #[error("duplicate feature {name:?} in block {block:?}")]
    DuplicateFeature { block: String, name: String },
    #[error("feature space has no block {0:?}")]
    MissingBlock(&'static str),
    #[error("tagged sequence is empty")]
    EmptyTagged,
    #[error("tag {0:?} is not in the tagset")]
    UnknownTag(String),
}
