//! Tokenization, n-gram windows and vocabularies.
//!
//! Tokenizer rules:
//!
//! * text is split on whitespace first;
//! * every punctuation character becomes its own token (`!!` gives `!`, `!`),
//!   except that a run of two or more periods stays whole (`...`);
//! * an apostrophe between word characters stays inside the word
//!   (`couldn't`), as do `.` and `,` between digits (`3.5`, `1,000`);
//! * hyphens and currency symbols are punctuation, hence standalone tokens;
//! * word tokens are lowercased and never stemmed.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::hashing::FieldHasher;

pub const START: &str = "<s>";
pub const END: &str = "</s>";
pub const UNKNOWN: &str = "<unk>";

/// Tokens of one review.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenSeq {
    pub source_id: String,
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        Self {
            source_id: source_id.into(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

const EXTRA_PUNCT: &[char] = &[
    '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}', '\u{2013}', '\u{2014}', '\u{2026}', '\u{20AC}',
    '\u{00A3}', '\u{00A5}', '\u{00A2}', '\u{00AB}', '\u{00BB}', '\u{2022}', '\u{00A1}', '\u{00BF}',
    '\u{00B0}', '\u{00A9}', '\u{00AE}', '\u{2122}', '\u{00A7}', '\u{00B6}', '\u{2020}', '\u{2021}',
    '\u{2032}', '\u{2033}', '\u{00B7}',
];

pub fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || EXTRA_PUNCT.contains(&c)
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !is_punct(c)
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Tokenize raw review text.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

/// Tokenize and tag with a source id.
pub fn tokenize_seq(source_id: &str, text: &str) -> TokenSeq {
    TokenSeq::new(source_id, tokenize(text))
}

fn tokenize_chunk(chunk: &str, out: &mut Vec<String>) {
    let chars: Vec<char> = chunk.chars().collect();
    let mut word = String::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let prev = if i > 0 { Some(chars[i - 1]) } else { None };
        let next = chars.get(i + 1).copied();
        let joins_word = match (prev, next) {
            (Some(p), Some(n)) if !word.is_empty() => {
                (is_apostrophe(c) && is_word_char(p) && is_word_char(n))
                    || ((c == '.' || c == ',') && p.is_ascii_digit() && n.is_ascii_digit())
            }
            _ => false,
        };
        if is_word_char(c) || joins_word {
            word.extend(c.to_lowercase());
            i += 1;
            continue;
        }
        flush(&mut word, out);
        if c == '.' {
            let start = i;
            while i < chars.len() && chars[i] == '.' {
                i += 1;
            }
            let run = i - start;
            if run >= 2 {
                out.push(".".repeat(run));
            } else {
                out.push(".".to_string());
            }
            continue;
        }
        out.push(c.to_string());
        i += 1;
    }
    flush(&mut word, out);
}

fn flush(word: &mut String, out: &mut Vec<String>) {
    if !word.is_empty() {
        out.push(core::mem::take(word));
    }
}

/// Contiguous windows of length `n`.
///
/// With `with_markers`, the sequence is first padded with `n − 1` start
/// tokens and one end token.
pub fn ngrams<'a, S: AsRef<str>>(tokens: &'a [S], n: usize, with_markers: bool) -> Vec<Vec<&'a str>> {
    assert!(n >= 1, "n-gram order must be at least 1");
    let mut seq: Vec<&'a str> = Vec::with_capacity(tokens.len() + n);
    if with_markers {
        seq.extend(core::iter::repeat(START).take(n - 1));
    }
    seq.extend(tokens.iter().map(|t| t.as_ref()));
    if with_markers {
        seq.push(END);
    }
    if seq.len() < n {
        return Vec::new();
    }
    seq.windows(n).map(|w| w.to_vec()).collect()
}

/// Display name of an n-gram feature: tokens joined by `_`.
pub fn ngram_name<S: AsRef<str>>(gram: &[S]) -> String {
    let mut name = String::new();
    for (i, t) in gram.iter().enumerate() {
        if i > 0 {
            name.push('_');
        }
        name.push_str(t.as_ref());
    }
    name
}

/// Dense token index. Indices 0, 1, 2 are the start, end and unknown markers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    tokens: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, u32>,
}

impl Vocabulary {
    pub const START_ID: u32 = 0;
    pub const END_ID: u32 = 1;
    pub const UNKNOWN_ID: u32 = 2;

    /// Build from an ordered token list, reserved markers prepended.
    pub fn from_tokens<I: IntoIterator<Item = String>>(tokens: I) -> Self {
        let mut all: Vec<String> = [START, END, UNKNOWN].iter().map(|s| s.to_string()).collect();
        for t in tokens {
            if t != START && t != END && t != UNKNOWN {
                all.push(t);
            }
        }
        let mut v = Self {
            tokens: all,
            index: BTreeMap::new(),
        };
        v.rebuild_index();
        v
    }

    /// Restore the lookup table after deserialization.
    pub fn rebuild_index(&mut self) {
        self.index = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn index_or_unknown(&self, token: &str) -> u32 {
        self.index(token).unwrap_or(Self::UNKNOWN_ID)
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn content_hash(&self) -> String {
        let mut h = FieldHasher::new();
        for t in &self.tokens {
            h.str(t);
        }
        h.finish_hex()
    }
}

/// Tokens occurring at least `min_count` times across `corpora`, ordered by
/// frequency (descending) then lexicographically.
pub fn build_vocab(corpora: &[TokenSeq], min_count: usize) -> Vocabulary {
    let min_count = min_count.max(1);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for seq in corpora {
        for t in &seq.tokens {
            *counts.entry(t.as_str()).or_insert(0) += 1;
        }
    }
    let mut kept: Vec<(&str, usize)> = counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
    kept.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    Vocabulary::from_tokens(kept.into_iter().map(|(t, _)| t.to_string()))
}
