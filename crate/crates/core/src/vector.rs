//! Dense fixed-dimension feature vectors: L2 normalization, cosine
//! similarity, and near-orthogonality statistics.

use std::collections::HashSet;

use crate::{Error, Result};

/// Norm at or below which a vector is treated as the all-zero sentinel for
/// an empty document and passes through normalization unchanged.
pub const ZERO_NORM_EPS: f64 = 1e-12;

/// A document or token representation of fixed dimension, double precision
/// throughout. `normalized` marks vectors of unit L2 norm; the all-zero
/// sentinel (empty document) may also carry the flag.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
    normalized: bool,
}

impl FeatureVector {
    /// The zero vector of the given dimension.
    pub fn zeros(dim: usize) -> Self {
        FeatureVector {
            values: vec![0.0; dim],
            normalized: false,
        }
    }

    /// Wraps raw component values; the result is not marked normalized.
    pub fn from_values(values: Vec<f64>) -> Self {
        FeatureVector {
            values,
            normalized: false,
        }
    }

    /// Wraps values already known to have unit norm (or be the zero
    /// sentinel). Callers are responsible for that invariant.
    pub(crate) fn from_unit_values(values: Vec<f64>) -> Self {
        FeatureVector {
            values,
            normalized: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn norm(&self) -> f64 {
        dot_slices(&self.values, &self.values).sqrt()
    }

    /// Scales to unit L2 norm. Vectors with norm at or below
    /// [`ZERO_NORM_EPS`] pass through unchanged as the zero sentinel.
    /// Idempotent to within one rounding per component.
    pub fn l2_normalize(mut self) -> FeatureVector {
        let norm = self.norm();
        if norm > ZERO_NORM_EPS {
            for v in &mut self.values {
                *v /= norm;
            }
        }
        self.normalized = true;
        self
    }
}

/// Dot product of two vectors of equal dimension.
pub fn dot(u: &FeatureVector, v: &FeatureVector) -> f64 {
    debug_assert_eq!(u.dim(), v.dim());
    dot_slices(u.values(), v.values())
}

/// Cosine similarity of two L2-normalized vectors: their dot product
/// clamped to [-1, 1]. Bitwise-identical non-zero inputs score exactly 1
/// (a floating-point self-dot can round just below 1, but identical
/// documents must compare as fully similar).
pub fn cosine(u: &FeatureVector, v: &FeatureVector) -> Result<f64> {
    if u.dim() != v.dim() {
        return Err(Error::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    debug_assert!(
        u.is_normalized() && v.is_normalized(),
        "cosine expects L2-normalized inputs"
    );
    Ok(score_slices(u.values(), v.values()))
}

/// Similarity score used by [`cosine`] and nearest-neighbor scans.
pub(crate) fn score_slices(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        if a.iter().all(|&x| x == 0.0) {
            return 0.0;
        }
        return 1.0;
    }
    dot_slices(a, b).clamp(-1.0, 1.0)
}

/// Four-lane dot product; the fixed reduction order keeps results
/// reproducible while letting the loop vectorize.
pub(crate) fn dot_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut lanes = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (xa, xb) in (&mut ca).zip(&mut cb) {
        lanes[0] += xa[0] * xb[0];
        lanes[1] += xa[1] * xb[1];
        lanes[2] += xa[2] * xb[2];
        lanes[3] += xa[3] * xb[3];
    }
    let mut tail = 0.0;
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        tail += x * y;
    }
    (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]) + tail
}

/// Sample statistics of pairwise dot products over all distinct unordered
/// token pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityStats {
    pub mean: f64,
    /// Sample standard deviation (n-1 denominator).
    pub std: f64,
    pub pairs: usize,
}

/// Encodes each distinct token once with `encoder` and returns the sample
/// mean and standard deviation of dot products over all distinct unordered
/// token pairs. Duplicate tokens in the sample are ignored; fewer than two
/// distinct tokens is an error.
pub fn orthogonality_stats<S, F>(
    token_sample: &[S],
    dim: usize,
    encoder: F,
) -> Result<OrthogonalityStats>
where
    S: AsRef<str>,
    F: Fn(&str) -> FeatureVector,
{
    let mut seen = HashSet::new();
    let mut vectors = Vec::new();
    for token in token_sample {
        let token = token.as_ref();
        if seen.insert(token) {
            let v = encoder(token);
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            vectors.push(v);
        }
    }
    if vectors.len() < 2 {
        return Err(Error::invalid_argument(
            "orthogonality statistics need at least two distinct tokens",
        ));
    }

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for v in &vectors[i + 1..] {
            let d = dot(u, v);
            sum += d;
            sum_sq += d * d;
        }
    }
    let pairs = vectors.len() * (vectors.len() - 1) / 2;
    let mean = sum / pairs as f64;
    let variance = if pairs > 1 {
        ((sum_sq - pairs as f64 * mean * mean) / (pairs as f64 - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(OrthogonalityStats {
        mean,
        std: variance.sqrt(),
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_three_four_five() {
        let v = FeatureVector::from_values(vec![3.0, 4.0]).l2_normalize();
        assert_eq!(v.values(), &[0.6, 0.8]);
        assert!(v.is_normalized());
    }

    #[test]
    fn normalize_zero_vector_passes_through() {
        let v = FeatureVector::zeros(4).l2_normalize();
        assert!(v.is_zero());
        assert!(v.is_normalized());
    }

    #[test]
    fn normalize_is_idempotent_on_unit_vector() {
        let v = FeatureVector::from_values(vec![1.0, 2.0, -3.0, 0.5]).l2_normalize();
        let w = v.clone().l2_normalize();
        for (a, b) in v.values().iter().zip(w.values()) {
            assert!((a - b).abs() <= 1e-15, "{a} vs {b}");
        }
    }

    #[test]
    fn cosine_basis_vectors() {
        let e0 = FeatureVector::from_values(vec![1.0, 0.0]).l2_normalize();
        let e1 = FeatureVector::from_values(vec![0.0, 1.0]).l2_normalize();
        assert_eq!(cosine(&e0, &e0).unwrap(), 1.0);
        assert_eq!(cosine(&e0, &e1).unwrap(), 0.0);
    }

    #[test]
    fn cosine_identical_vectors_score_exactly_one() {
        let v = FeatureVector::from_values(vec![0.3, -1.2, 0.7, 2.0, -0.1]).l2_normalize();
        assert_eq!(cosine(&v, &v.clone()).unwrap(), 1.0);
    }

    #[test]
    fn cosine_zero_sentinels_score_zero() {
        let z = FeatureVector::zeros(3).l2_normalize();
        assert_eq!(cosine(&z, &z.clone()).unwrap(), 0.0);
    }

    #[test]
    fn cosine_dimension_mismatch() {
        let u = FeatureVector::zeros(2).l2_normalize();
        let v = FeatureVector::zeros(3).l2_normalize();
        assert!(matches!(
            cosine(&u, &v),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn cosine_clamps_rounding_excursions() {
        // Slightly super-unit values; not bitwise equal, dot > 1.
        let u = FeatureVector::from_unit_values(vec![1.0 + 4.0 * f64::EPSILON, 0.0]);
        let v = FeatureVector::from_unit_values(vec![1.0, 1e-18]);
        assert_eq!(cosine(&u, &v).unwrap(), 1.0);
        let w = FeatureVector::from_unit_values(vec![-(1.0 + 4.0 * f64::EPSILON), 1e-18]);
        assert_eq!(cosine(&u, &w).unwrap(), -1.0);
    }

    #[test]
    fn orthogonality_stats_toy_encoder() {
        // "a" -> e0, "b" -> e1, "c" -> (e0 + e1)/sqrt(2)
        let encoder = |t: &str| {
            let values = match t {
                "a" => vec![1.0, 0.0],
                "b" => vec![0.0, 1.0],
                _ => vec![1.0, 1.0],
            };
            FeatureVector::from_values(values).l2_normalize()
        };
        let stats = orthogonality_stats(&["a", "b", "c", "a"], 2, encoder).unwrap();
        assert_eq!(stats.pairs, 3);
        let x = 1.0 / f64::sqrt(2.0);
        let mean = (0.0 + x + x) / 3.0;
        assert!((stats.mean - mean).abs() < 1e-15);
        let var = ((0.0 - mean).powi(2) + 2.0 * (x - mean).powi(2)) / 2.0;
        assert!((stats.std - var.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn orthogonality_stats_requires_two_distinct_tokens() {
        let encoder = |_: &str| FeatureVector::from_values(vec![1.0]).l2_normalize();
        assert!(matches!(
            orthogonality_stats(&["aa", "aa"], 1, encoder),
            Err(Error::InvalidArgument(_))
        ));
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(values in prop::collection::vec(-1e6f64..1e6, 1..64)) {
            let v = FeatureVector::from_values(values).l2_normalize();
            let w = v.clone().l2_normalize();
            for (a, b) in v.values().iter().zip(w.values()) {
                prop_assert!((a - b).abs() <= 1e-15);
            }
        }

        #[test]
        fn cosine_is_symmetric_and_bounded(
            a in prop::collection::vec(-100.0f64..100.0, 8),
            b in prop::collection::vec(-100.0f64..100.0, 8),
        ) {
            let u = FeatureVector::from_values(a).l2_normalize();
            let v = FeatureVector::from_values(b).l2_normalize();
            let uv = cosine(&u, &v).unwrap();
            let vu = cosine(&v, &u).unwrap();
            prop_assert_eq!(uv, vu);
            prop_assert!((-1.0..=1.0).contains(&uv));
        }

        #[test]
        fn cosine_self_is_one(values in prop::collection::vec(-100.0f64..100.0, 1..32)) {
            prop_assume!(values.iter().any(|&x| x != 0.0));
            let v = FeatureVector::from_values(values).l2_normalize();
            let c = cosine(&v, &v.clone()).unwrap();
            prop_assert!((c - 1.0).abs() <= 1e-12);
        }
    }
}
