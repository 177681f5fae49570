use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use super::FeatureError;
use crate::hashing::FieldHasher;
use crate::math;

/// Sparse real vector tied to a [`FeatureSpace`] by id. Entries are sorted by
/// index and never hold explicit zeros.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    space_id: u64,
    entries: Vec<(u32, f64)>,
}

impl SparseVector {
    pub fn zero(space_id: u64) -> Self {
        Self { space_id, entries: Vec::new() }
    }

    /// Build from arbitrary (index, value) pairs: duplicates are summed and
    /// zeros dropped.
    pub fn from_pairs(space_id: u64, pairs: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut acc: BTreeMap<u32, f64> = BTreeMap::new();
        for (i, v) in pairs {
            *acc.entry(i).or_insert(0.0) += v;
        }
        Self {
            space_id,
            entries: acc.into_iter().filter(|&(_, v)| v != 0.0).collect(),
        }
    }

    pub fn space_id(&self) -> u64 {
        self.space_id
    }

    pub fn entries(&self) -> &[(u32, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(i, _)| i) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        math::l2_norm(self.entries.iter().map(|&(_, v)| v))
    }

    /// Scale to unit L2 norm. Returns false (and leaves the vector alone)
    /// when it is zero.
    pub fn normalize_l2(&mut self) -> bool {
        let n = self.norm();
        if n == 0.0 {
            return false;
        }
        for e in &mut self.entries {
            e.1 /= n;
        }
        true
    }

    pub fn normalized(mut self) -> Self {
        self.normalize_l2();
        self
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|&(i, v)| v * dense[i as usize]).sum()
    }

    pub fn max_index(&self) -> Option<u32> {
        self.entries.last().map(|&(i, _)| i)
    }

    /// Entries whose index falls in `range`, same space.
    pub fn slice(&self, range: Range<u32>) -> SparseVector {
        Self {
            space_id: self.space_id,
            entries: self.entries.iter().copied().filter(|(i, _)| range.contains(i)).collect(),
        }
    }

    /// Re-tag with another space id, e.g. when a vector built in a block
    /// space is placed into a combined space with the same layout.
    pub fn with_space(mut self, space_id: u64) -> Self {
        self.space_id = space_id;
        self
    }

    /// Shift all indices by `offset`.
    pub fn offset(mut self, offset: u32) -> Self {
        for e in &mut self.entries {
            e.0 += offset;
        }
        self
    }
}

/// Unit-normalize each block on its own and concatenate.
///
/// Blocks must belong to one space and occupy disjoint index ranges. The
/// result is not re-normalized, so `m` nonzero blocks give norm √m.
pub fn combine_blocks(blocks: &[SparseVector]) -> Result<SparseVector, FeatureError> {
    let Some(first) = blocks.first() else {
        return Err(FeatureError::NoBlocks);
    };
    let space_id = first.space_id;
    let mut spans: Vec<(u32, u32)> = Vec::new();
    for b in blocks {
        if b.space_id != space_id {
            return Err(FeatureError::SpaceMismatch { expected: space_id, got: b.space_id });
        }
        if let (Some(&(lo, _)), Some(&(hi, _))) = (b.entries.first(), b.entries.last()) {
            if spans.iter().any(|&(l, h)| lo <= h && l <= hi) {
                return Err(FeatureError::OverlappingBlocks);
            }
            spans.push((lo, hi));
        }
    }
    let mut entries: Vec<(u32, f64)> = Vec::new();
    for b in blocks {
        entries.extend(b.clone().normalized().entries);
    }
    entries.sort_by_key(|&(i, _)| i);
    Ok(SparseVector { space_id, entries })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    pub name: String,
    pub start: u32,
    names: Vec<String>,
    #[serde(skip)]
    index: BTreeMap<String, u32>,
}

impl Block {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn range(&self) -> Range<u32> {
        self.start..self.start + self.names.len() as u32
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Global index of a feature in this block.
    pub fn index(&self, name: &str) -> Option<u32> {
        self.index.get(name).map(|&local| self.start + local)
    }
}

/// Named features laid out as consecutive blocks. Names are unique within a
/// block; `block:name` is unique across the space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpace {
    id: u64,
    blocks: Vec<Block>,
}

impl FeatureSpace {
    pub fn builder() -> FeatureSpaceBuilder {
        FeatureSpaceBuilder { blocks: Vec::new() }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(Block::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    /// (block name, feature name) of a global index.
    pub fn name(&self, index: u32) -> Option<(&str, &str)> {
        self.blocks.iter().find(|b| b.range().contains(&index)).map(|b| {
            (b.name.as_str(), b.names[(index - b.start) as usize].as_str())
        })
    }

    /// (index, block, name) for every feature in order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &str, &str)> + '_ {
        self.blocks.iter().flat_map(|b| {
            b.names
                .iter()
                .enumerate()
                .map(move |(i, n)| (b.start + i as u32, b.name.as_str(), n.as_str()))
        })
    }

    /// Hex digest of the layout, used to pair model files with spaces.
    pub fn layout_hash(&self) -> String {
        layout_digest(&self.blocks).finish_hex()
    }

    /// Restore lookup tables after deserialization.
    pub fn rebuild_index(&mut self) {
        for b in &mut self.blocks {
            b.index = b.names.iter().enumerate().map(|(i, n)| (n.clone(), i as u32)).collect();
        }
    }
}

fn layout_digest(blocks: &[Block]) -> FieldHasher {
    let mut h = FieldHasher::new();
    for b in blocks {
        h.str(&b.name).u64(b.names.len() as u64);
        for n in &b.names {
            h.str(n);
        }
    }
    h
}

pub struct FeatureSpaceBuilder {
    blocks: Vec<Block>,
}

impl FeatureSpaceBuilder {
    pub fn block<I, S>(mut self, name: &str, names: I) -> Result<Self, FeatureError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if self.blocks.iter().any(|b| b.name == name) {
            return Err(FeatureError::DuplicateBlock(name.into()));
        }
        let start = self.blocks.iter().map(Block::len).sum::<usize>() as u32;
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i as u32).is_some() {
                return Err(FeatureError::DuplicateFeature { block: name.into(), name: n.clone() });
            }
        }
        self.blocks.push(Block { name: name.into(), start, names, index });
        Ok(self)
    }

    pub fn build(self) -> FeatureSpace {
        let id = layout_digest(&self.blocks).finish_u64();
        FeatureSpace { id, blocks: self.blocks }
    }
}
