//! The classical hashing trick: tokens hash to vector indices and the
//! vector is bumped at those indices, with an optional second sign hash
//! that mitigates collision bias.
//!
//! The hash is MurmurHash3 x86 32-bit with seed 0 over the token's UTF-8
//! bytes, read as a two's-complement signed value; the index is the
//! wrapping absolute value mod L. This matches the reference vectorizer
//! that the tested similarity values come from, so any deviation here
//! breaks the golden tests.

use crate::vector::FeatureVector;
use crate::{Error, Result};

/// MurmurHash3 x86 32-bit.
pub fn murmur3_x86_32(data: &[u8], seed: u32) -> u32 {
    const C1: u32 = 0xcc9e_2d51;
    const C2: u32 = 0x1b87_3593;

    let mut h = seed;
    let mut chunks = data.chunks_exact(4);
    for chunk in &mut chunks {
        let mut k = u32::from_le_bytes(chunk.try_into().unwrap());
        k = k.wrapping_mul(C1);
        k = k.rotate_left(15);
        k = k.wrapping_mul(C2);
        h ^= k;
        h = h.rotate_left(13);
        h = h.wrapping_mul(5).wrapping_add(0xe654_6b64);
    }

    let tail = chunks.remainder();
    if !tail.is_empty() {
        let mut k = 0u32;
        for (i, &byte) in tail.iter().enumerate() {
            k ^= u32::from(byte) << (8 * i);
        }
        k = k.wrapping_mul(C1);
        k = k.rotate_left(15);
        k = k.wrapping_mul(C2);
        h ^= k;
    }

    h ^= data.len() as u32;
    h ^= h >> 16;
    h = h.wrapping_mul(0x85eb_ca6b);
    h ^= h >> 13;
    h = h.wrapping_mul(0xc2b2_ae35);
    h ^= h >> 16;
    h
}

/// Murmur hash of a token's UTF-8 bytes with seed 0, reinterpreted as a
/// signed 32-bit value.
pub fn murmur32_signed(token: &str) -> i32 {
    murmur3_x86_32(token.as_bytes(), 0) as i32
}

/// Dimension and update-sign choice for hashed bag-of-words encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashTrickConfig {
    dim: usize,
    signed: bool,
}

impl HashTrickConfig {
    /// `signed` selects the collision-mitigating variant where the update
    /// is the sign of the hash instead of +1.
    pub fn new(dim: usize, signed: bool) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid_argument("dimension must be at least 1"));
        }
        Ok(HashTrickConfig { dim, signed })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }
}

/// The un-normalized update vector: each token bumps index |h| mod L by +1
/// (unsigned) or by the sign of h (signed), where the absolute value wraps
/// so that i32::MIN maps to 2^31 and sign(0) counts as +1.
pub fn ht_counts<S: AsRef<str>>(tokens: &[S], cfg: HashTrickConfig) -> Vec<f64> {
    let mut values = vec![0.0; cfg.dim];
    for token in tokens {
        let h = murmur32_signed(token.as_ref());
        let index = (h.unsigned_abs() as usize) % cfg.dim;
        values[index] += if cfg.signed && h < 0 { -1.0 } else { 1.0 };
    }
    values
}

/// Hashed bag-of-words encoding of a token sequence, L2-normalized.
/// An empty token sequence yields the zero sentinel.
pub fn ht_encode<S: AsRef<str>>(tokens: &[S], cfg: HashTrickConfig) -> FeatureVector {
    FeatureVector::from_values(ht_counts(tokens, cfg)).l2_normalize()
}
