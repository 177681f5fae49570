//! File formats, report writers and the `opspam` command-line tool built on
//! [`opspam_core`].

pub mod build;
pub mod cli;
pub mod config;
pub mod corpus_io;
pub mod judges_io;
pub mod lexicon_io;
pub mod model_io;
pub mod report;
pub mod tagged;

pub use opspam_core as core;
