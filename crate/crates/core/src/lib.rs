//! Core algorithms for detecting deceptive opinion spam in reviews.
//!
//! Everything in this crate is pure computation over in-memory data and builds
//! without `std` (only `alloc` is required). File formats, reports and the
//! command-line interface live in the companion `opspam` crate.
//!
//! The pieces:
//!
//! * [`corpus`]: reviews, hotel-blocked fold plans, candidate filtering,
//!   truncated log-normal length matching and descriptive statistics.
//! * [`textproc`]: the tokenizer, n-gram windows and vocabularies.
//! * [`lm`]: interpolated Kneser-Ney language models and the
//!   maximum-likelihood class decision.
//! * [`features`]: sparse vectors, feature spaces, n-gram, POS and lexicon
//!   features.
//! * [`svm`]: a linear SVM trained by dual coordinate descent.
//! * [`stats`]: micro-averaged metrics, exact tests and agreement statistics.
//! * [`experiments`]: the nested cross-validation protocol.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod corpus;
pub mod experiments;
pub mod features;
pub mod hashing;
pub mod label;
pub mod lm;
pub mod math;
pub mod stats;
pub mod svm;
pub mod textproc;

pub use label::Label;
