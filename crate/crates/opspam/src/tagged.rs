//! Pre-tagged documents: one `token<TAB>TAG` pair per line and a blank line
//! between documents. A document may open with `#id<TAB><review id>`; files
//! without such headers are matched to reviews by position.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use opspam_core::corpus::Corpus;
use opspam_core::features::{TaggedSeq, PENN_TAGSET};

#[derive(Debug, thiserror::Error)]
pub enum TaggedError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected token<TAB>TAG")]
    Malformed { line: usize },
    #[error("line {line}: tag {tag:?} is not a Penn Treebank tag")]
    UnknownTag { line: usize, tag: String },
    #[error("some documents carry #id headers and some do not")]
    MixedHeaders,
    #[error("{docs} tagged documents for {reviews} reviews")]
    CountMismatch { docs: usize, reviews: usize },
    #[error("tagged document for unknown review {0:?}")]
    UnknownReview(String),
    #[error("review {0:?} is tagged twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaggedDoc {
    pub id: Option<String>,
    pub seq: TaggedSeq,
}

pub fn parse_tagged(text: &str) -> Result<Vec<TaggedDoc>, TaggedError> {
    let mut docs = Vec::new();
    let mut current = TaggedDoc { id: None, seq: TaggedSeq::default() };
    let flush = |docs: &mut Vec<TaggedDoc>, current: &mut TaggedDoc| {
        if current.id.is_some() || !current.seq.pairs.is_empty() {
            docs.push(std::mem::replace(current, TaggedDoc { id: None, seq: TaggedSeq::default() }));
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim_end_matches('\r');
        if l.trim().is_empty() {
            flush(&mut docs, &mut current);
            continue;
        }
        if let Some(rest) = l.strip_prefix("#id\t") {
            flush(&mut docs, &mut current);
            current.id = Some(rest.trim().to_string());
            continue;
        }
        let (token, tag) = l.rsplit_once('\t').ok_or(TaggedError::Malformed { line })?;
        let tag = tag.trim();
        if token.is_empty() || tag.is_empty() {
            return Err(TaggedError::Malformed { line });
        }
        if !PENN_TAGSET.contains(&tag) {
            return Err(TaggedError::UnknownTag { line, tag: tag.into() });
        }
        current.seq.pairs.push((token.to_string(), tag.to_string()));
    }
    flush(&mut docs, &mut current);
    Ok(docs)
}

/// Tags keyed by review id, matched by header or by corpus order.
pub fn load_tags(path: &Path, corpus: &Corpus) -> Result<BTreeMap<String, TaggedSeq>, TaggedError> {
    let text = fs::read_to_string(path).map_err(|source| TaggedError::Io { path: path.into(), source })?;
    assign_tags(parse_tagged(&text)?, corpus)
}

pub fn assign_tags(docs: Vec<TaggedDoc>, corpus: &Corpus) -> Result<BTreeMap<String, TaggedSeq>, TaggedError> {
    let with_ids = docs.iter().filter(|d| d.id.is_some()).count();
    let mut out = BTreeMap::new();
    if with_ids == 0 {
        if docs.len() != corpus.len() {
            return Err(TaggedError::CountMismatch { docs: docs.len(), reviews: corpus.len() });
        }
        for (doc, review) in docs.into_iter().zip(corpus.reviews()) {
            out.insert(review.id.clone(), doc.seq);
        }
        return Ok(out);
    }
    if with_ids != docs.len() {
        return Err(TaggedError::MixedHeaders);
    }
    let known: std::collections::BTreeSet<&str> = corpus.reviews().iter().map(|r| r.id.as_str()).collect();
    for doc in docs {
        let id = doc.id.expect("checked above");
        if !known.contains(id.as_str()) {
            return Err(TaggedError::UnknownReview(id));
        }
        if out.insert(id.clone(), doc.seq).is_some() {
            return Err(TaggedError::Duplicate(id));
        }
    }
    Ok(out)
}
