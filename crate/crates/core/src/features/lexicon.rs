use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{FeatureError, FeatureSpace, SparseVector};
use crate::textproc::TokenSeq;

pub const LEXICON_BLOCK: &str = "lexicon";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: file must open with a '%' line")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed category row")]
    MalformedHeader { line: usize },
    #[error("line {line}: category id {id} declared twice")]
    DuplicateCategory { line: usize, id: u32 },
    #[error("header is never closed by a '%' line")]
    UnclosedHeader,
    #[error("line {line}: empty pattern")]
    EmptyPattern { line: usize },
    #[error("line {line}: entry has no category ids")]
    NoCategories { line: usize },
    #[error("line {line}: {token:?} is not a category id")]
    BadCategoryId { line: usize, token: String },
    #[error("line {line}: category {id} is not declared")]
    UnknownCategory { line: usize, id: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Category {
    /// Id as written in the file.
    pub id: u32,
    pub name: String,
    /// Characters a punctuation token must consist of to count here.
    pub punct: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct TrieNode {
    children: BTreeMap<char, usize>,
    categories: Option<Vec<usize>>,
}

/// Word-category dictionary. Category indices are dense, in header order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    categories: Vec<Category>,
    literals: BTreeMap<String, Vec<usize>>,
    prefixes: BTreeMap<String, Vec<usize>>,
    trie: Vec<TrieNode>,
}

fn is_percent_line(s: &str) -> bool {
    s.trim() == "%"
}

impl Lexicon {
    /// Build directly from categories and (pattern, dense category indices)
    /// entries. A trailing `*` marks a prefix pattern.
    pub fn new(categories: Vec<Category>, entries: &[(&str, &[usize])]) -> Result<Self, LexiconError> {
        let mut lex = Lexicon {
            categories,
            literals: BTreeMap::new(),
            prefixes: BTreeMap::new(),
            trie: Vec::new(),
        };
        for (i, (pattern, cats)) in entries.iter().enumerate() {
            if let Some(&bad) = cats.iter().find(|&&c| c >= lex.categories.len()) {
                return Err(LexiconError::UnknownCategory { line: i + 1, id: bad as u32 });
            }
            lex.insert(pattern, cats, i + 1)?;
        }
        lex.build_trie();
        Ok(lex)
    }

    /// Parse the percent-delimited dictionary format (fields separated by
    /// tabs):
    ///
    /// ```text
    /// %
    /// 1   posemo
    /// 2   period   .!?
    /// %
    /// happ*   1
    /// ```
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
        let mut categories: Vec<Category> = Vec::new();
        let mut by_id: BTreeMap<u32, usize> = BTreeMap::new();

        loop {
            match lines.next() {
                None => return Err(LexiconError::MissingHeader { line: 1 }),
                Some((_, l)) if l.trim().is_empty() => continue,
                Some((_, l)) if is_percent_line(l) => break,
                Some((line, _)) => return Err(LexiconError::MissingHeader { line }),
            }
        }
        let mut closed = false;
        for (line, l) in lines.by_ref() {
            if is_percent_line(l) {
                closed = true;
                break;
            }
            if l.trim().is_empty() {
                continue;
            }
            let mut fields = l.split('\t').filter(|f| !f.is_empty());
            let (Some(id), Some(name)) = (fields.next(), fields.next()) else {
                return Err(LexiconError::MalformedHeader { line });
            };
            let id: u32 = id.trim().parse().map_err(|_| LexiconError::MalformedHeader { line })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(LexiconError::MalformedHeader { line });
            }
            let punct = fields.next().map(|p| p.to_string());
            if fields.next().is_some() {
                return Err(LexiconError::MalformedHeader { line });
            }
            if by_id.insert(id, categories.len()).is_some() {
                return Err(LexiconError::DuplicateCategory { line, id });
            }
            categories.push(Category { id, name: name.to_string(), punct });
        }
        if !closed {
            return Err(LexiconError::UnclosedHeader);
        }

        let mut lex = Lexicon {
            categories,
            literals: BTreeMap::new(),
            prefixes: BTreeMap::new(),
            trie: Vec::new(),
        };
        for (line, l) in lines {
            if l.trim().is_empty() {
                continue;
            }
            let mut fields = l.split('\t').map(str::trim).filter(|f| !f.is_empty());
            let pattern = fields.next().unwrap_or("");
            let mut cats = Vec::new();
            for f in fields {
                let id: u32 = f
                    .parse()
                    .map_err(|_| LexiconError::BadCategoryId { line, token: f.to_string() })?;
                let &idx = by_id.get(&id).ok_or(LexiconError::UnknownCategory { line, id })?;
                cats.push(idx);
            }
            if cats.is_empty() {
                return Err(LexiconError::NoCategories { line });
            }
            lex.insert(pattern, &cats, line)?;
        }
        lex.build_trie();
        Ok(lex)
    }

    fn insert(&mut self, pattern: &str, cats: &[usize], line: usize) -> Result<(), LexiconError> {
        let lowered = pattern.trim().to_lowercase();
        let (key, table) = match lowered.strip_suffix('*') {
            Some(p) => (p.to_string(), &mut self.prefixes),
            None => (lowered, &mut self.literals),
        };
        if key.is_empty() {
            return Err(LexiconError::EmptyPattern { line });
        }
        let slot = table.entry(key).or_default();
        slot.extend_from_slice(cats);
        slot.sort_unstable();
        slot.dedup();
        Ok(())
    }

    fn build_trie(&mut self) {
        self.trie = alloc::vec![TrieNode::default()];
        for (prefix, cats) in &self.prefixes {
            let mut node = 0;
            for ch in prefix.chars() {
                node = match self.trie[node].children.get(&ch) {
                    Some(&n) => n,
                    None => {
                        self.trie.push(TrieNode::default());
                        let n = self.trie.len() - 1;
                        self.trie[node].children.insert(ch, n);
                        n
                    }
                };
            }
            self.trie[node].categories = Some(cats.clone());
        }
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    /// Literal and prefix pattern counts.
    pub fn pattern_counts(&self) -> (usize, usize) {
        (self.literals.len(), self.prefixes.len())
    }

    /// Dense category indices of the entry matching `token`: an exact
    /// literal first, else the longest matching prefix pattern.
    pub fn lookup(&self, token: &str) -> Option<&[usize]> {
        if let Some(c) = self.literals.get(token) {
            return Some(c);
        }
        let mut node = 0;
        let mut best = self.trie.first().and_then(|n| n.categories.as_deref());
        for ch in token.chars() {
            match self.trie.get(node).and_then(|n| n.children.get(&ch)) {
                Some(&next) => {
                    node = next;
                    if let Some(c) = self.trie[node].categories.as_deref() {
                        best = Some(c);
                    }
                }
                None => break,
            }
        }
        best
    }

    /// Canonical text form: header in declaration order, then entries
    /// sorted by pattern with ids ascending.
    pub fn dump(&self) -> String {
        let mut out = String::from("%\n");
        for c in &self.categories {
            match &c.punct {
                Some(p) => out.push_str(&format!("{}\t{}\t{}\n", c.id, c.name, p)),
                None => out.push_str(&format!("{}\t{}\n", c.id, c.name)),
            }
        }
        out.push_str("%\n");
        let mut rows: Vec<(String, Vec<u32>)> = Vec::new();
        for (p, cats) in &self.literals {
            rows.push((p.clone(), cats.iter().map(|&i| self.categories[i].id).collect()));
        }
        for (p, cats) in &self.prefixes {
            rows.push((format!("{p}*"), cats.iter().map(|&i| self.categories[i].id).collect()));
        }
        rows.sort();
        for (p, mut ids) in rows {
            ids.sort_unstable();
            out.push_str(&p);
            for id in ids {
                out.push('\t');
                out.push_str(&id.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// One feature per category, named after it.
pub fn lexicon_space(lexicon: &Lexicon) -> Result<FeatureSpace, FeatureError> {
    Ok(FeatureSpace::builder()
        .block(LEXICON_BLOCK, lexicon.categories.iter().map(|c| c.name.clone()))?
        .build())
}

/// Per-category share of tokens. A token adds one to every category of its
/// matching entry, and to every punctuation category whose character class
/// contains all of its characters.
pub fn lexicon_rates(seq: &TokenSeq, lexicon: &Lexicon) -> Vec<f64> {
    let mut counts = alloc::vec![0u64; lexicon.categories.len()];
    for tok in &seq.tokens {
        if let Some(cats) = lexicon.lookup(tok) {
            for &c in cats {
                counts[c] += 1;
            }
        }
        for (c, cat) in lexicon.categories.iter().enumerate() {
            if let Some(class) = &cat.punct {
                if !tok.is_empty() && tok.chars().all(|ch| class.contains(ch)) {
                    counts[c] += 1;
                }
            }
        }
    }
    let n = seq.tokens.len();
    if n == 0 {
        return alloc::vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// Unit-length vector of category rates.
pub fn lexicon_vector(seq: &TokenSeq, lexicon: &Lexicon, space: &FeatureSpace) -> Result<SparseVector, FeatureError> {
    let block = space.block(LEXICON_BLOCK).ok_or(FeatureError::MissingBlock(LEXICON_BLOCK))?;
    let rates = lexicon_rates(seq, lexicon);
    Ok(SparseVector::from_pairs(
        space.id(),
        rates.into_iter().enumerate().map(|(i, r)| (block.start + i as u32, r)),
    )
    .normalized())
}
