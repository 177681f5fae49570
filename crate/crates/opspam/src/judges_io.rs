//! Judge annotations CSV: `item_id,true_label,judge1,judge2,...`.

use std::path::{Path, PathBuf};

use opspam_core::stats::{AnnotatedItem, JudgeAnnotations, StatsError};
use opspam_core::Label;

#[derive(Debug, thiserror::Error)]
pub enum JudgesFileError {
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("header needs item_id, true_label and at least one judge column")]
    Header,
    #[error("line {line}: unknown label {token:?}")]
    BadLabel { line: u64, token: String },
    #[error("line {line}: expected {expected} fields, got {got}")]
    Width { line: u64, expected: usize, got: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
}

pub fn load_judges(path: &Path) -> Result<JudgeAnnotations, JudgesFileError> {
    let csv_err = |source| JudgesFileError::Csv { path: path.into(), source };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err)?;
    let headers = reader.headers().map_err(csv_err)?.clone();
    if headers.len() < 3
        || !headers[0].eq_ignore_ascii_case("item_id")
        || !headers[1].eq_ignore_ascii_case("true_label")
    {
        return Err(JudgesFileError::Header);
    }
    let mut items = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != headers.len() {
            return Err(JudgesFileError::Width { line, expected: headers.len(), got: record.len() });
        }
        let label = |s: &str| s.parse::<Label>().map_err(|_| JudgesFileError::BadLabel { line, token: s.into() });
        let truth = label(&record[1])?;
        let judgments = record.iter().skip(2).map(label).collect::<Result<Vec<_>, _>>()?;
        items.push(AnnotatedItem { id: record[0].to_string(), truth, judgments });
    }
    Ok(JudgeAnnotations::new(items)?)
}
