//! Nearest-neighbor classification by maximum dot product over a matrix of
//! L2-normalized training vectors, plus accuracy / spam-caught /
//! blocked-ham metrics. No learning involved.

use std::borrow::Borrow;

use rayon::prelude::*;

use crate::vector::{score_slices, FeatureVector};
use crate::{Error, Result};

/// Tolerance on row norms accepted by [`VectorIndex::push`].
const ROW_NORM_TOL: f64 = 1e-9;

/// Immutable matrix of labeled L2-normalized training vectors, stored
/// row-major for cache-friendly scans.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    dim: usize,
    matrix: Vec<f64>,
    labels: Vec<String>,
}

impl VectorIndex {
    pub fn new(dim: usize) -> Self {
        VectorIndex {
            dim,
            matrix: Vec::new(),
            labels: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, rows: usize) -> Self {
        VectorIndex {
            dim,
            matrix: Vec::with_capacity(dim * rows),
            labels: Vec::with_capacity(rows),
        }
    }

    /// Appends a row; the vector must have unit norm (within 1e-9) or be
    /// the zero sentinel.
    pub fn push(&mut self, vector: &FeatureVector, label: impl Into<String>) -> Result<()> {
        if vector.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: vector.dim(),
            });
        }
        let norm = vector.norm();
        if (norm - 1.0).abs() > ROW_NORM_TOL && !vector.is_zero() {
            return Err(Error::invalid_argument(format!(
                "index rows must be L2-normalized or zero, got norm {norm}"
            )));
        }
        self.matrix.extend_from_slice(vector.values());
        self.labels.push(label.into());
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, row: usize) -> &str {
        &self.labels[row]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.matrix[row * self.dim..(row + 1) * self.dim]
    }
}

/// Outcome of a nearest-neighbor query.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: String,
    /// Dot product against the winning row; 0.0 for a zero-sentinel query.
    pub score: f64,
    /// Row index of the winning neighbor.
    pub neighbor: usize,
}

/// Label of the training row with the highest dot product against the
/// query; ties break to the lowest row index. A zero-sentinel query scores
/// 0 against every row and resolves to row 0.
pub fn nn_classify(query: &FeatureVector, index: &VectorIndex) -> Result<Classification> {
    if index.is_empty() {
        return Err(Error::invalid_argument(
            "cannot classify against an empty index",
        ));
    }
    if query.dim() != index.dim() {
        return Err(Error::DimensionMismatch {
            left: query.dim(),
            right: index.dim(),
        });
    }
    let (neighbor, score) = nearest_row(query.values(), index);
    Ok(Classification {
        label: index.label(neighbor).to_owned(),
        score,
        neighbor,
    })
}

fn nearest_row(query: &[f64], index: &VectorIndex) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_score = score_slices(query, index.row(0));
    for row in 1..index.len() {
        let score = score_slices(query, index.row(row));
        if score > best_score {
            best = row;
            best_score = score;
        }
    }
    (best, best_score)
}

/// Classifies every query independently (in parallel); results are in
/// query order and identical to per-query [`nn_classify`] calls. Queries
/// may be owned vectors or references.
pub fn classify_batch<Q>(queries: &[Q], index: &VectorIndex) -> Result<Vec<Classification>>
where
    Q: Borrow<FeatureVector> + Sync,
{
    if index.is_empty() {
        return Err(Error::invalid_argument(
            "cannot classify against an empty index",
        ));
    }
    for q in queries {
        if q.borrow().dim() != index.dim() {
            return Err(Error::DimensionMismatch {
                left: q.borrow().dim(),
                right: index.dim(),
            });
        }
    }
    // Block queries so each index row read from memory is reused across
    // the whole block; the scan is otherwise memory-bound.
    const BLOCK: usize = 32;
    let results: Vec<Vec<Classification>> = queries
        .par_chunks(BLOCK)
        .map(|chunk| {
            let mut best: Vec<(usize, f64)> = chunk
                .iter()
                .map(|q| (0usize, score_slices(q.borrow().values(), index.row(0))))
                .collect();
            for row in 1..index.len() {
                let row_values = index.row(row);
                for (q, slot) in chunk.iter().zip(best.iter_mut()) {
                    let score = score_slices(q.borrow().values(), row_values);
                    if score > slot.1 {
                        *slot = (row, score);
                    }
                }
            }
            best.into_iter()
                .map(|(neighbor, score)| Classification {
                    label: index.label(neighbor).to_owned(),
                    score,
                    neighbor,
                })
                .collect()
        })
        .collect();
    Ok(results.into_iter().flatten().collect())
}

/// Confusion counts with `positive` as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfusionCounts {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

/// Accuracy, spam-caught, and blocked-ham rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    /// Fraction of predictions that match the truth.
    pub accuracy: f64,
    /// Fraction of true positives among all positives in the truth; NaN
    /// when the truth contains no positives (`spam_caught_defined` false).
    pub spam_caught: f64,
    pub spam_caught_defined: bool,
    /// Fraction of negatives misclassified as positive; NaN when the truth
    /// contains no negatives (`blocked_ham_defined` false).
    pub blocked_ham: f64,
    pub blocked_ham_defined: bool,
    pub counts: ConfusionCounts,
}

/// Computes ACC, SC, and BH from aligned prediction and truth labels.
/// Any label other than `positive` counts as the negative class.
pub fn spam_metrics<S: AsRef<str>, T: AsRef<str>>(
    predictions: &[S],
    truth: &[T],
    positive: &str,
) -> Result<MetricsReport> {
    if predictions.len() != truth.len() {
        return Err(Error::invalid_argument(format!(
            "predictions and truth have different lengths: {} vs {}",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::invalid_argument(
            "cannot compute metrics over zero predictions",
        ));
    }

    let mut counts = ConfusionCounts::default();
    for (pred, truth) in predictions.iter().zip(truth) {
        let pred_pos = pred.as_ref() == positive;
        let truth_pos = truth.as_ref() == positive;
        match (pred_pos, truth_pos) {
            (true, true) => counts.true_positive += 1,
            (true, false) => counts.false_positive += 1,
            (false, true) => counts.false_negative += 1,
            (false, false) => counts.true_negative += 1,
        }
    }

    let total = predictions.len() as f64;
    let positives = counts.true_positive + counts.false_negative;
    let negatives = counts.false_positive + counts.true_negative;
    let accuracy = (counts.true_positive + counts.true_negative) as f64 / total;
    let (spam_caught, spam_caught_defined) = if positives > 0 {
        (counts.true_positive as f64 / positives as f64, true)
    } else {
        (f64::NAN, false)
    };
    let (blocked_ham, blocked_ham_defined) = if negatives > 0 {
        (counts.false_positive as f64 / negatives as f64, true)
    } else {
        (f64::NAN, false)
    };

    Ok(MetricsReport {
        accuracy,
        spam_caught,
        spam_caught_defined,
        blocked_ham,
        blocked_ham_defined,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::additive::Randomizer;

    fn index_from(rows: &[(&[f64], &str)]) -> VectorIndex {
        let mut index = VectorIndex::new(rows[0].0.len());
        for (values, label) in rows {
            let v = FeatureVector::from_values(values.to_vec()).l2_normalize();
            index.push(&v, *label).unwrap();
        }
        index
    }

    #[test]
    fn self_match_scores_exactly_one() {
        let rz = Randomizer::new(32).unwrap();
        let mut index = VectorIndex::new(32);
        for i in 0..8 {
            index
                .push(&rz.token_vector(&format!("t{i}")), format!("l{i}"))
                .unwrap();
        }
        let query = rz.token_vector("t5");
        let hit = nn_classify(&query, &index).unwrap();
        assert_eq!(hit.label, "l5");
        assert_eq!(hit.neighbor, 5);
        assert_eq!(hit.score, 1.0);
    }

    #[test]
    fn ties_break_to_lowest_row_index() {
        let index = index_from(&[(&[1.0, 0.0], "A"), (&[1.0, 0.0], "B")]);
        let query = FeatureVector::from_values(vec![1.0, 0.0]).l2_normalize();
        let hit = nn_classify(&query, &index).unwrap();
        assert_eq!(hit.label, "A");
        assert_eq!(hit.neighbor, 0);
    }

    #[test]
    fn zero_query_resolves_to_row_zero_with_zero_score() {
        let index = index_from(&[(&[1.0, 0.0], "A"), (&[0.0, 1.0], "B")]);
        let query = FeatureVector::zeros(2).l2_normalize();
        let hit = nn_classify(&query, &index).unwrap();
        assert_eq!(hit.neighbor, 0);
        assert_eq!(hit.score, 0.0);
    }

    #[test]
    fn empty_index_and_dimension_mismatch_are_errors() {
        let index = VectorIndex::new(2);
        let query = FeatureVector::zeros(2).l2_normalize();
        assert!(nn_classify(&query, &index).is_err());

        let index = index_from(&[(&[1.0, 0.0], "A")]);
        let query3 = FeatureVector::zeros(3).l2_normalize();
        assert!(matches!(
            nn_classify(&query3, &index),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn push_rejects_unnormalized_rows() {
        let mut index = VectorIndex::new(2);
        let raw = FeatureVector::from_values(vec![3.0, 4.0]);
        assert!(index.push(&raw, "A").is_err());
        let zero = FeatureVector::zeros(2);
        assert!(index.push(&zero, "Z").is_ok());
    }

    #[test]
    fn batch_matches_single_queries() {
        let rz = Randomizer::new(64).unwrap();
        let mut index = VectorIndex::new(64);
        for i in 0..50 {
            index
                .push(&rz.token_vector(&format!("row{i}")), format!("c{}", i % 5))
                .unwrap();
        }
        let queries: Vec<_> = (0..97).map(|i| rz.token_vector(&format!("q{i}"))).collect();
        let batch = classify_batch(&queries, &index).unwrap();
        for (q, got) in queries.iter().zip(&batch) {
            let single = nn_classify(q, &index).unwrap();
            assert_eq!(*got, single);
        }
    }

    #[test]
    fn metrics_hand_counted_example() {
        let truth = ["spam", "spam", "ham", "ham"];
        let pred = ["spam", "ham", "ham", "spam"];
        let m = spam_metrics(&pred, &truth, "spam").unwrap();
        assert_eq!(m.accuracy, 0.5);
        assert_eq!(m.spam_caught, 0.5);
        assert_eq!(m.blocked_ham, 0.5);
        assert_eq!(
            m.counts,
            ConfusionCounts {
                true_positive: 1,
                false_positive: 1,
                true_negative: 1,
                false_negative: 1,
            }
        );
    }

    #[test]
    fn metrics_perfect_classifier() {
        let labels = ["spam", "ham", "ham", "spam", "ham"];
        let m = spam_metrics(&labels, &labels, "spam").unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.spam_caught, 1.0);
        assert_eq!(m.blocked_ham, 0.0);
    }

    #[test]
    fn metrics_undefined_rates_are_flagged() {
        let truth = ["ham", "ham"];
        let pred = ["ham", "spam"];
        let m = spam_metrics(&pred, &truth, "spam").unwrap();
        assert!(!m.spam_caught_defined);
        assert!(m.spam_caught.is_nan());
        assert!(m.blocked_ham_defined);
        assert_eq!(m.blocked_ham, 0.5);
    }

    #[test]
    fn metrics_invariant_under_negative_relabeling() {
        let truth_a = ["spam", "ham", "ham"];
        let pred_a = ["spam", "spam", "ham"];
        let truth_b = ["spam", "other", "other"];
        let pred_b = ["spam", "spam", "other"];
        let a = spam_metrics(&pred_a, &truth_a, "spam").unwrap();
        let b = spam_metrics(&pred_b, &truth_b, "spam").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn metrics_length_mismatch_is_an_error() {
        assert!(spam_metrics(&["spam"], &["spam", "ham"], "spam").is_err());
    }
}
