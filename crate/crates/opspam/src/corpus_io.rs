//! Loading reviews from a CSV manifest or from the directory layout of the
//! public release (`<polarity>/<label dir>/foldN/{d,t}_<hotel>_<n>.txt`).
//!
//! Manifest columns, by header name: `id`, `path`, `label`, `hotel` are
//! required; `fold` (1-based, `3` or `fold3`), `star_rating`,
//! `first_time_author`, `authoring_minutes`, `author_id` and `polarity` are
//! optional. Paths are relative to the manifest's directory.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use opspam_core::corpus::{Corpus, CorpusError, Polarity, Review};
use opspam_core::Label;
use walkdir::WalkDir;

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: text is not valid UTF-8")]
    NotUtf8 { path: PathBuf },
    #[error("manifest line {line}: {message}")]
    Csv { line: u64, message: String },
    #[error("manifest has no {0:?} column")]
    MissingColumn(&'static str),
    #[error("manifest line {line}: unknown label {token:?}")]
    BadLabel { line: u64, token: String },
    #[error("manifest line {line}: bad {column} value {value:?}")]
    BadField { line: u64, column: &'static str, value: String },
    #[error("{path}: cannot infer {what} from the path")]
    BadPath { path: PathBuf, what: &'static str },
    #[error("no review files under {0}")]
    NoReviews(PathBuf),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

fn read_text(path: &Path) -> Result<String, LoadError> {
    let bytes = fs::read(path).map_err(|source| LoadError::Io { path: path.into(), source })?;
    String::from_utf8(bytes).map_err(|_| LoadError::NotUtf8 { path: path.into() })
}

/// Reviews from a manifest file or a directory tree.
pub fn load_reviews(source: &Path) -> Result<Vec<Review>, LoadError> {
    let meta = fs::metadata(source).map_err(|e| LoadError::Io { path: source.into(), source: e })?;
    if meta.is_dir() {
        load_directory(source)
    } else {
        load_manifest(source)
    }
}

/// A validated corpus from a manifest file or a directory tree.
pub fn load_corpus(source: &Path) -> Result<Corpus, LoadError> {
    Ok(Corpus::new(load_reviews(source)?)?)
}

/// Parse a 1-based fold label (`3` or `fold3`) into a 0-based index.
pub fn parse_fold(s: &str) -> Option<usize> {
    let digits = s.trim().trim_start_matches("fold");
    match digits.parse::<usize>() {
        Ok(n) if n >= 1 => Some(n - 1),
        _ => None,
    }
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "1" | "true" | "yes" | "y" => Some(true),
        "0" | "false" | "no" | "n" => Some(false),
        _ => None,
    }
}

fn parse_polarity(s: &str) -> Option<Polarity> {
    match s.trim().to_ascii_lowercase().as_str() {
        "positive" | "pos" => Some(Polarity::Positive),
        "negative" | "neg" => Some(Polarity::Negative),
        _ => None,
    }
}

pub fn load_manifest(path: &Path) -> Result<Vec<Review>, LoadError> {
    let base = path.parent().unwrap_or(Path::new("")).to_path_buf();
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let headers = reader.headers().map_err(|e| csv_error(path, e))?.clone();
    let cols: HashMap<String, usize> = headers
        .iter()
        .enumerate()
        .map(|(i, h)| (h.to_ascii_lowercase(), i))
        .collect();
    let col = |name: &'static str| cols.get(name).copied();
    let need = |name: &'static str| col(name).ok_or(LoadError::MissingColumn(name));
    let (c_id, c_path, c_label, c_hotel) = (need("id")?, need("path")?, need("label")?, need("hotel")?);

    let mut reviews = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let get = |c: Option<usize>| c.and_then(|c| record.get(c)).filter(|v| !v.is_empty());
        let field = |c: usize| record.get(c).unwrap_or("");
        let label: Label = field(c_label)
            .parse()
            .map_err(|_| LoadError::BadLabel { line, token: field(c_label).into() })?;
        let text = read_text(&base.join(field(c_path)))?;
        let mut r = Review::new(field(c_id), text, label, field(c_hotel));
        if let Some(v) = get(col("fold")) {
            r.fold = Some(parse_fold(v).ok_or(LoadError::BadField { line, column: "fold", value: v.into() })?);
        }
        if let Some(v) = get(col("star_rating")) {
            let stars = v
                .parse::<u8>()
                .ok()
                .filter(|s| (1..=5).contains(s))
                .ok_or(LoadError::BadField { line, column: "star_rating", value: v.into() })?;
            r.star_rating = Some(stars);
        }
        if let Some(v) = get(col("first_time_author")) {
            r.is_first_time_author =
                Some(parse_bool(v).ok_or(LoadError::BadField { line, column: "first_time_author", value: v.into() })?);
        }
        if let Some(v) = get(col("authoring_minutes")) {
            let t = v
                .parse::<f64>()
                .ok()
                .filter(|t| t.is_finite() && *t >= 0.0)
                .ok_or(LoadError::BadField { line, column: "authoring_minutes", value: v.into() })?;
            r.authoring_minutes = Some(t);
        }
        if let Some(v) = get(col("author_id")) {
            r.author_id = Some(v.into());
        }
        if let Some(v) = get(col("polarity")) {
            r.polarity = parse_polarity(v).ok_or(LoadError::BadField { line, column: "polarity", value: v.into() })?;
        }
        reviews.push(r);
    }
    Ok(reviews)
}

fn csv_error(path: &Path, e: csv::Error) -> LoadError {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(source) => LoadError::Io { path: path.into(), source },
        kind => LoadError::Csv { line, message: format!("{kind:?}") },
    }
}

/// Walk a directory tree of review text files, inferring metadata from
/// path segments.
pub fn load_directory(root: &Path) -> Result<Vec<Review>, LoadError> {
    let mut files: Vec<PathBuf> = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| LoadError::Io {
            path: e.path().unwrap_or(root).into(),
            source: e.into_io_error().unwrap_or_else(|| std::io::Error::other("directory loop")),
        })?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|x| x == "txt") {
            files.push(entry.into_path());
        }
    }
    if files.is_empty() {
        return Err(LoadError::NoReviews(root.into()));
    }
    let mut reviews = Vec::with_capacity(files.len());
    for path in files {
        let rel = path.strip_prefix(root).unwrap_or(&path);
        let segments: Vec<String> = rel.iter().map(|s| s.to_string_lossy().to_ascii_lowercase()).collect();
        let dirs = &segments[..segments.len() - 1];
        let label = if dirs.iter().any(|s| s.contains("deceptive")) {
            Label::Deceptive
        } else if dirs.iter().any(|s| s.contains("truthful")) {
            Label::Truthful
        } else {
            return Err(LoadError::BadPath { path: path.clone(), what: "label" });
        };
        let fold = dirs.iter().find_map(|s| s.strip_prefix("fold").and_then(parse_fold_digits));
        let polarity = if dirs.iter().any(|s| s.starts_with("negative")) {
            Polarity::Negative
        } else {
            Polarity::Positive
        };
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let hotel = hotel_from_stem(&stem).ok_or_else(|| LoadError::BadPath { path: path.clone(), what: "hotel" })?;
        let id = rel.iter().map(|s| s.to_string_lossy()).collect::<Vec<_>>().join("/");
        let mut r = Review::new(id, read_text(&path)?, label, hotel);
        r.fold = fold;
        r.polarity = polarity;
        reviews.push(r);
    }
    Ok(reviews)
}

fn parse_fold_digits(s: &str) -> Option<usize> {
    s.parse::<usize>().ok().filter(|&n| n >= 1).map(|n| n - 1)
}

/// `d_hilton_12` → `hilton`; `t_the_james_3` → `the_james`.
fn hotel_from_stem(stem: &str) -> Option<String> {
    let (_, rest) = stem.split_once('_')?;
    let (hotel, _) = rest.rsplit_once('_')?;
    (!hotel.is_empty()).then(|| hotel.to_string())
}
