//! Additive feature hashing: every token maps to a pseudo-random ±1/√L
//! vector derived from its SHAKE-256 digest, and a document is the
//! L2-normalized sum of its token vectors. Because the combiner is plain
//! vector addition, replacing one token updates a document by subtracting
//! one token vector and adding another instead of re-encoding from scratch.
//!
//! Token vectors of distinct tokens are almost orthogonal in high
//! dimension: their dot products have mean 0 and standard deviation 1/√L.

use sha3::digest::{ExtendableOutput, Update, XofReader};
use sha3::Shake256;

use crate::vector::FeatureVector;
use crate::{Error, Result};

/// Maps tokens to ±1/√L vectors of a fixed dimension (a multiple of 8, so
/// the digest is exactly L/8 bytes).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Randomizer {
    dim: usize,
    scale: f64,
}

impl Randomizer {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(8) {
            return Err(Error::invalid_argument(format!(
                "dimension must be a positive multiple of 8, got {dim}"
            )));
        }
        Ok(Randomizer {
            dim,
            scale: 1.0 / (dim as f64).sqrt(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// SHAKE-256 digest of the token's UTF-8 bytes, L/8 bytes long.
    pub fn digest(&self, token: &str) -> Vec<u8> {
        let mut hasher = Shake256::default();
        hasher.update(token.as_bytes());
        let mut out = vec![0u8; self.dim / 8];
        hasher.finalize_xof().read(&mut out);
        out
    }

    /// The ±1/√L vector for one token. Bit k of the digest-as-little-endian
    /// integer, read from the most significant end — bit 7-(k mod 8) of byte
    /// B-1-⌊k/8⌋ — sets the sign of component k: 1 maps to +1/√L, 0 to -1/√L.
    pub fn token_vector(&self, token: &str) -> FeatureVector {
        let digest = self.digest(token);
        let mut values = Vec::with_capacity(self.dim);
        for &byte in digest.iter().rev() {
            for bit in (0..8).rev() {
                let sign = f64::from(((byte >> bit) & 1) as i32 * 2 - 1);
                values.push(sign * self.scale);
            }
        }
        FeatureVector::from_unit_values(values)
    }

    /// Adds (`weight` = 1) or removes (`weight` = -1) a token's ±1 sign
    /// pattern into integer bit-sum accumulators, ordered like
    /// [`Randomizer::token_vector`].
    pub fn accumulate(&self, token: &str, sums: &mut [i64], weight: i64) {
        debug_assert_eq!(sums.len(), self.dim);
        let digest = self.digest(token);
        accumulate_digest(&digest, sums, weight);
    }

    /// Converts integer bit sums into the L2-normalized document vector.
    pub fn vector_from_sums(&self, sums: &[i64]) -> FeatureVector {
        debug_assert_eq!(sums.len(), self.dim);
        let values = sums.iter().map(|&c| c as f64 * self.scale).collect();
        FeatureVector::from_values(values).l2_normalize()
    }
}

/// Applies one digest's ±1 sign pattern to integer bit sums. Split out so
/// that callers batch-encoding a corpus can cache digests per token.
pub fn accumulate_digest(digest: &[u8], sums: &mut [i64], weight: i64) {
    debug_assert_eq!(sums.len(), digest.len() * 8);
    let mut k = 0;
    for &byte in digest.iter().rev() {
        for bit in (0..8).rev() {
            if (byte >> bit) & 1 == 1 {
                sums[k] += weight;
            } else {
                sums[k] -= weight;
            }
            k += 1;
        }
    }
}

/// Encodes a token sequence as the L2-normalized sum of its token vectors.
/// An empty sequence yields the zero sentinel. Components are accumulated
/// as integer multiples of 1/√L, so the result is exactly permutation
/// invariant.
pub fn encode<S: AsRef<str>>(tokens: &[S], randomizer: &Randomizer) -> FeatureVector {
    let mut sums = vec![0i64; randomizer.dim()];
    for token in tokens {
        randomizer.accumulate(token.as_ref(), &mut sums, 1);
    }
    randomizer.vector_from_sums(&sums)
}

/// Running un-normalized token-vector sum for one document, supporting
/// incremental single-token replacement.
///
/// The accumulator does not track which tokens were added; removing a token
/// that was never added silently corrupts the sum, exactly as subtracting
/// an arbitrary vector would.
#[derive(Debug, Clone)]
pub struct DocumentAccumulator {
    randomizer: Randomizer,
    sums: Vec<i64>,
    token_count: usize,
}

impl DocumentAccumulator {
    pub fn new(randomizer: Randomizer) -> Self {
        let sums = vec![0i64; randomizer.dim()];
        DocumentAccumulator {
            randomizer,
            sums,
            token_count: 0,
        }
    }

    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], randomizer: Randomizer) -> Self {
        let mut acc = DocumentAccumulator::new(randomizer);
        for token in tokens {
            acc.add(token.as_ref());
        }
        acc
    }

    pub fn dim(&self) -> usize {
        self.randomizer.dim()
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    pub fn add(&mut self, token: &str) {
        self.randomizer.accumulate(token, &mut self.sums, 1);
        self.token_count += 1;
    }

    pub fn remove(&mut self, token: &str) -> Result<()> {
        if self.token_count == 0 {
            return Err(Error::InvalidState(
                "cannot remove a token from an empty document".into(),
            ));
        }
        self.randomizer.accumulate(token, &mut self.sums, -1);
        self.token_count -= 1;
        Ok(())
    }

    /// Removes and/or adds one token; either side may be absent.
    pub fn update(&mut self, remove: Option<&str>, add: Option<&str>) -> Result<()> {
        if let Some(token) = remove {
            self.remove(token)?;
        }
        if let Some(token) = add {
            self.add(token);
        }
        Ok(())
    }

    /// The un-normalized vector sum; each component is an integer multiple
    /// of 1/√L.
    pub fn raw_sum(&self) -> Vec<f64> {
        let scale = 1.0 / (self.dim() as f64).sqrt();
        self.sums.iter().map(|&c| c as f64 * scale).collect()
    }

    /// The current document vector: the L2-normalized sum.
    pub fn vector(&self) -> FeatureVector {
        self.randomizer.vector_from_sums(&self.sums)
    }
}
