//! Model JSON and feature-space TSV files.
//!
//! A model `fold1.json` is paired with the space dump `fold1.space.tsv`
//! (`index<TAB>block<TAB>name` per line); the model records the layout hash
//! of its space so mismatched pairs are rejected.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use opspam_core::features::{FeatureError, FeatureSpace};
use opspam_core::svm::{LinearModel, LinearModelData, SvmError};

#[derive(Debug, thiserror::Error)]
pub enum ModelFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path} line {line}: {message}")]
    SpaceFormat { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Space { path: PathBuf, source: FeatureError },
    #[error("{path}: {source}")]
    Model { path: PathBuf, source: SvmError },
    #[error("{model}: space hash does not match {space}")]
    HashMismatch { model: PathBuf, space: PathBuf },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ModelFileError + '_ {
    move |source| ModelFileError::Io { path: path.into(), source }
}

/// Space dump path for a model path: `x/fold1.json` → `x/fold1.space.tsv`.
pub fn space_path_for(model: &Path) -> PathBuf {
    model.with_extension("space.tsv")
}

pub fn save_space(path: &Path, space: &FeatureSpace) -> Result<(), ModelFileError> {
    let mut out = std::io::BufWriter::new(fs::File::create(path).map_err(io(path))?);
    for (i, block, name) in space.iter() {
        writeln!(out, "{i}\t{block}\t{name}").map_err(io(path))?;
    }
    out.flush().map_err(io(path))
}

pub fn load_space(path: &Path) -> Result<FeatureSpace, ModelFileError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let mut blocks: Vec<(String, Vec<String>)> = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let bad = |message: &str| ModelFileError::SpaceFormat { path: path.into(), line: n + 1, message: message.into() };
        let mut parts = line.splitn(3, '\t');
        let (Some(idx), Some(block), Some(name)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad("expected index<TAB>block<TAB>name"));
        };
        if idx.parse::<usize>().ok() != Some(n) {
            return Err(bad("indices must run 0, 1, 2, ..."));
        }
        match blocks.last_mut() {
            Some((b, names)) if b == block => names.push(name.into()),
            _ => blocks.push((block.into(), vec![name.into()])),
        }
    }
    let mut builder = FeatureSpace::builder();
    for (block, names) in blocks {
        builder = builder
            .block(&block, names)
            .map_err(|source| ModelFileError::Space { path: path.into(), source })?;
    }
    Ok(builder.build())
}

/// Write the model and its space dump side by side.
pub fn save_model(path: &Path, model: &LinearModel, space: &FeatureSpace) -> Result<(), ModelFileError> {
    let json = serde_json::to_string_pretty(&model.to_data(space))
        .map_err(|source| ModelFileError::Json { path: path.into(), source })?;
    fs::write(path, json + "\n").map_err(io(path))?;
    save_space(&space_path_for(path), space)
}

/// Load a model and its space, checking they belong together.
pub fn load_model(path: &Path) -> Result<(FeatureSpace, LinearModel), ModelFileError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let data: LinearModelData =
        serde_json::from_str(&text).map_err(|source| ModelFileError::Json { path: path.into(), source })?;
    let space_path = space_path_for(path);
    let space = load_space(&space_path)?;
    if space.layout_hash() != data.space_hash || space.id() != data.space_id || space.len() != data.dim {
        return Err(ModelFileError::HashMismatch { model: path.into(), space: space_path });
    }
    let model = LinearModel::from_data(data).map_err(|source| ModelFileError::Model { path: path.into(), source })?;
    Ok((space, model))
}
