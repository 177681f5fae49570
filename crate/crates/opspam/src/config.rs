//! Experiment configuration, as JSON or `key = value` lines.
//!
//! ```text
//! # comments start with '#'
//! approach = BIGRAMS+_SVM
//! grid = 0.01, 0.1, 1, 10, 100
//! seed = 7
//! corpus = data/manifest.csv
//! lexicon = dict.txt
//! tags = tagged.txt
//! out = results
//! folds = 5
//! tol = 1e-4
//! ```
//!
//! Relative paths are resolved against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path} line {line}: {message}")]
    Line { path: PathBuf, line: usize, message: String },
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub approach: Option<String>,
    pub grid: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub corpus: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub tags: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub folds: Option<usize>,
    pub tol: Option<f64>,
}

impl ExperimentFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let mut cfg = if text.trim_start().starts_with('{') {
            serde_json::from_str(&text).map_err(|source| ConfigError::Json { path: path.into(), source })?
        } else {
            Self::parse_kv(&text).map_err(|(line, message)| ConfigError::Line { path: path.into(), line, message })?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.corpus, &mut cfg.lexicon, &mut cfg.tags, &mut cfg.out].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Parse `key = value` text; errors carry (line, message).
    pub fn parse_kv(text: &str) -> Result<Self, (usize, String)> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.split('#').next().unwrap_or("").trim();
            if l.is_empty() {
                continue;
            }
            let (key, value) = l.split_once('=').ok_or((line, "expected key = value".to_string()))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| (line, format!("bad {what} value {value:?}"));
            match key {
                "approach" => cfg.approach = Some(value.into()),
                "grid" => {
                    let grid = value
                        .split(',')
                        .map(|v| v.trim().parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|_| bad("grid"))?;
                    cfg.grid = Some(grid);
                }
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
                "corpus" => cfg.corpus = Some(value.into()),
                "lexicon" => cfg.lexicon = Some(value.into()),
                "tags" => cfg.tags = Some(value.into()),
                "out" => cfg.out = Some(value.into()),
                "folds" => cfg.folds = Some(value.parse().map_err(|_| bad("folds"))?),
                "tol" => cfg.tol = Some(value.parse().map_err(|_| bad("tol"))?),
                other => return Err((line, format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }
}
