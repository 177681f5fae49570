//! Content hashes and seed derivation.

use alloc::string::String;
use core::fmt::Write;

use sha2::{Digest, Sha256};

/// Incremental SHA-256 over length-prefixed fields, so that field boundaries
/// are part of the digest.
#[derive(Clone, Default)]
pub struct FieldHasher(Sha256);

impl FieldHasher {
    pub fn new() -> Self {
        Self(Sha256::new())
    }

    pub fn field(&mut self, bytes: &[u8]) -> &mut Self {
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
        self
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.field(s.as_bytes())
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.field(&v.to_le_bytes())
    }

    pub fn finish_hex(self) -> String {
        let digest = self.0.finalize();
        let mut out = String::with_capacity(64);
        for b in digest.iter() {
            let _ = write!(out, "{b:02x}");
        }
        out
    }

    pub fn finish_u64(self) -> u64 {
        let digest = self.0.finalize();
        let mut bytes = [0u8; 8];
        bytes.copy_from_slice(&digest[..8]);
        u64::from_le_bytes(bytes)
    }
}

/// Derive an independent seed for a named component from a root seed.
pub fn derive_seed(root: u64, label: &str) -> u64 {
    let mut h = FieldHasher::new();
    h.u64(root).str(label);
    h.finish_u64()
}
