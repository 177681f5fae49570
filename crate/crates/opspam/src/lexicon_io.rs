use std::fs;
use std::path::{Path, PathBuf};

use opspam_core::features::{Lexicon, LexiconError};

#[derive(Debug, thiserror::Error)]
pub enum LexiconFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: LexiconError },
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon, LexiconFileError> {
    let text = fs::read_to_string(path).map_err(|source| LexiconFileError::Io { path: path.into(), source })?;
    Lexicon::parse(&text).map_err(|source| LexiconFileError::Parse { path: path.into(), source })
}

pub fn save_lexicon(path: &Path, lexicon: &Lexicon) -> Result<(), LexiconFileError> {
    fs::write(path, lexicon.dump()).map_err(|source| LexiconFileError::Io { path: path.into(), source })
}
