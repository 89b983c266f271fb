//! Experiment harnesses: synthetic perturbation-similarity curves,
//! language recognition, and SMS spam filtering, emitting machine-readable
//! result tables (CSV or JSON lines).
//!
//! Runs are replayable: per-trial generators are seeded `base_seed +
//! trial_index`, and rows are sorted by (experiment, method, L, p, metric)
//! so scheduling never changes the output bytes.

use std::collections::HashMap;
use std::io::{self, Write};
use std::str::FromStr;

use serde::Serialize;

use crate::additive::{accumulate_digest, encode as ah_encode, Randomizer};
use crate::classify::{classify_batch, spam_metrics, VectorIndex};
use crate::data::{
    first_classes, gen_random_string, perturb, seeded_rng, split_indices, take_per_class,
    LabeledDataset, WiliDataset,
};
use crate::hash_trick::{ht_encode, murmur32_signed, HashTrickConfig};
use crate::tokenize::char_ngrams;
use crate::vector::{cosine, FeatureVector};
use crate::{Error, Result};

/// Length of the random base strings in the synthetic experiment.
pub const SYNTHETIC_STRING_LEN: usize = 100;

/// Positive class label in the spam experiment.
pub const SPAM_LABEL: &str = "spam";

/// Encoding method under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Additive hashing: normalized sum of ±1/√L token vectors.
    #[serde(rename = "ah")]
    Additive,
    /// Hashing trick with sign-hash collision mitigation.
    #[serde(rename = "ht")]
    HtSigned,
    /// Hashing trick with plain +1 updates.
    #[serde(rename = "ht-unsigned")]
    HtUnsigned,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Additive => "ah",
            Method::HtSigned => "ht",
            Method::HtUnsigned => "ht-unsigned",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ah" => Ok(Method::Additive),
            "ht" => Ok(Method::HtSigned),
            "ht-unsigned" => Ok(Method::HtUnsigned),
            other => Err(Error::invalid_argument(format!(
                "unknown method {other:?}, expected ah, ht, or ht-unsigned"
            ))),
        }
    }
}

/// What a result row measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Metric {
    #[serde(rename = "similarity")]
    Similarity,
    #[serde(rename = "acc")]
    Accuracy,
    #[serde(rename = "sc")]
    SpamCaught,
    #[serde(rename = "bh")]
    BlockedHam,
}

impl Metric {
    pub fn as_str(&self) -> &'static str {
        match self {
            Metric::Similarity => "similarity",
            Metric::Accuracy => "acc",
            Metric::SpamCaught => "sc",
            Metric::BlockedHam => "bh",
        }
    }

    fn order(&self) -> u8 {
        match self {
            Metric::Similarity => 0,
            Metric::Accuracy => 1,
            Metric::SpamCaught => 2,
            Metric::BlockedHam => 3,
        }
    }
}

impl std::fmt::Display for Metric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One measured value with full provenance for replay.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub method: Method,
    #[serde(rename = "n")]
    pub ngram: usize,
    #[serde(rename = "L")]
    pub dim: usize,
    /// Perturbation probability; synthetic rows only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub metric: Metric,
    pub value: f64,
    pub trials: usize,
    pub seed: u64,
}

/// Shared experiment parameters. Dimensions are given as exponents:
/// L = 2^ℓ for each listed ℓ.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub ngram: usize,
    pub dim_exponents: Vec<u32>,
    pub trials: usize,
    pub seed: u64,
    /// Lowercase text before n-gram extraction.
    pub lowercase: bool,
    /// Language-recognition subset: number of classes, lexicographic.
    pub subset_languages: usize,
    /// Language-recognition subset: paragraphs kept per class and split.
    pub per_class: usize,
    /// Use the full corpus instead of the subset (long running).
    pub full: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: vec![Method::Additive, Method::HtSigned],
            ngram: 3,
            dim_exponents: vec![7, 8, 9, 10],
            trials: 100,
            seed: 42,
            lowercase: false,
            subset_languages: 20,
            per_class: 100,
            full: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::invalid_argument("at least one method is required"));
        }
        if self.ngram == 0 {
            return Err(Error::invalid_argument("n-gram length must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::invalid_argument("trial count must be at least 1"));
        }
        if self.dim_exponents.is_empty() {
            return Err(Error::invalid_argument(
                "at least one dimension exponent is required",
            ));
        }
        for &exp in &self.dim_exponents {
            if exp > 30 {
                return Err(Error::invalid_argument(format!(
                    "dimension exponent {exp} is out of range (max 30)"
                )));
            }
            if self.methods.contains(&Method::Additive) && exp < 3 {
                return Err(Error::invalid_argument(format!(
                    "additive hashing needs 2^l divisible by 8; exponent {exp} is too small"
                )));
            }
        }
        Ok(())
    }

    fn dims(&self) -> Vec<usize> {
        self.dim_exponents.iter().map(|&e| 1usize << e).collect()
    }
}

/// Encodes one token sequence with the given method and dimension.
pub fn encode_tokens<S: AsRef<str>>(
    method: Method,
    tokens: &[S],
    dim: usize,
) -> Result<FeatureVector> {
    match method {
        Method::Additive => Ok(ah_encode(tokens, &Randomizer::new(dim)?)),
        Method::HtSigned => Ok(ht_encode(tokens, HashTrickConfig::new(dim, true)?)),
        Method::HtUnsigned => Ok(ht_encode(tokens, HashTrickConfig::new(dim, false)?)),
    }
}

/// Corpus encoder that caches per-token hash work (digests or index/sign
/// slots), since corpus tokens repeat heavily.
enum CachedEncoder {
    Additive {
        randomizer: Randomizer,
        digests: HashMap<String, Vec<u8>>,
    },
    HashTrick {
        config: HashTrickConfig,
        slots: HashMap<String, (usize, f64)>,
    },
}

impl CachedEncoder {
    fn new(method: Method, dim: usize) -> Result<Self> {
        Ok(match method {
            Method::Additive => CachedEncoder::Additive {
                randomizer: Randomizer::new(dim)?,
                digests: HashMap::new(),
            },
            Method::HtSigned => CachedEncoder::HashTrick {
                config: HashTrickConfig::new(dim, true)?,
                slots: HashMap::new(),
            },
            Method::HtUnsigned => CachedEncoder::HashTrick {
                config: HashTrickConfig::new(dim, false)?,
                slots: HashMap::new(),
            },
        })
    }

    fn encode(&mut self, tokens: &[String]) -> FeatureVector {
        match self {
            CachedEncoder::Additive {
                randomizer,
                digests,
            } => {
                let mut sums = vec![0i64; randomizer.dim()];
                for token in tokens {
                    let digest = digests
                        .entry(token.clone())
                        .or_insert_with(|| randomizer.digest(token));
                    accumulate_digest(digest, &mut sums, 1);
                }
                randomizer.vector_from_sums(&sums)
            }
            CachedEncoder::HashTrick { config, slots } => {
                let mut values = vec![0.0; config.dim()];
                let signed = config.is_signed();
                let dim = config.dim();
                for token in tokens {
                    let (index, update) = *slots.entry(token.clone()).or_insert_with(|| {
                        let h = murmur32_signed(token);
                        let index = (h.unsigned_abs() as usize) % dim;
                        (index, if signed && h < 0 { -1.0 } else { 1.0 })
                    });
                    values[index] += update;
                }
                FeatureVector::from_values(values).l2_normalize()
            }
        }
    }
}

fn document_tokens(text: &str, ngram: usize, lowercase: bool) -> Result<Vec<String>> {
    if lowercase {
        char_ngrams(&crate::tokenize::lowercase_codepoints(text), ngram)
    } else {
        char_ngrams(text, ngram)
    }
}

/// The 21-point perturbation grid 0, 0.05, ..., 1.
pub fn p_grid() -> Vec<f64> {
    (0..=20).map(|i| f64::from(i) / 20.0).collect()
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.experiment
            .cmp(&b.experiment)
            .then_with(|| a.method.as_str().cmp(b.method.as_str()))
            .then_with(|| a.dim.cmp(&b.dim))
            .then_with(|| match (a.p, b.p) {
                (Some(x), Some(y)) => x.total_cmp(&y),
                (None, None) => std::cmp::Ordering::Equal,
                (None, Some(_)) => std::cmp::Ordering::Less,
                (Some(_), None) => std::cmp::Ordering::Greater,
            })
            .then_with(|| a.metric.order().cmp(&b.metric.order()))
    });
}

/// Mean n-gram similarity between random strings and perturbed copies,
/// over the perturbation grid, for every configured method and dimension.
///
/// Each trial draws a fresh 100-character lowercase string, perturbs it at
/// probability p, encodes both with character n-grams, and records the
/// cosine; rows hold the mean over trials.
pub fn run_synthetic(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let dims = cfg.dims();
    let grid = p_grid();

    use rayon::prelude::*;
    let cell_means: Vec<Vec<f64>> = grid
        .par_iter()
        .map(|&p| -> Result<Vec<f64>> {
            let mut sums = vec![0.0; cfg.methods.len() * dims.len()];
            for trial in 0..cfg.trials {
                let mut rng = seeded_rng(cfg.seed.wrapping_add(trial as u64));
                let base = gen_random_string(SYNTHETIC_STRING_LEN, &mut rng)?;
                let altered = perturb(&base, p, &mut rng)?;
                let tokens = char_ngrams(&base, cfg.ngram)?;
                let altered_tokens = char_ngrams(&altered, cfg.ngram)?;
                let mut slot = 0;
                for &method in &cfg.methods {
                    for &dim in &dims {
                        let u = encode_tokens(method, &tokens, dim)?;
                        let v = encode_tokens(method, &altered_tokens, dim)?;
                        sums[slot] += cosine(&u, &v)?;
                        slot += 1;
                    }
                }
            }
            Ok(sums.into_iter().map(|s| s / cfg.trials as f64).collect())
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for (pi, &p) in grid.iter().enumerate() {
        let mut slot = 0;
        for &method in &cfg.methods {
            for &dim in &dims {
                rows.push(ResultRow {
                    experiment: "synthetic".into(),
                    method,
                    ngram: cfg.ngram,
                    dim,
                    p: Some(p),
                    metric: Metric::Similarity,
                    value: cell_means[pi][slot],
                    trials: cfg.trials,
                    seed: cfg.seed,
                });
                slot += 1;
            }
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Nearest-neighbor language recognition accuracy per method and dimension.
///
/// By default runs on the deterministic desk-scale subset: the
/// lexicographically first `subset_languages` classes with the first
/// `per_class` paragraphs each from both splits; `full` uses everything.
pub fn run_wili(cfg: &ExperimentConfig, data: &WiliDataset) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    let (train, test) = if cfg.full {
        (data.train.clone(), data.test.clone())
    } else {
        if cfg.subset_languages == 0 || cfg.per_class == 0 {
            return Err(Error::invalid_argument(
                "subset size parameters must be at least 1",
            ));
        }
        let classes = first_classes(&data.train, cfg.subset_languages);
        (
            take_per_class(&data.train, &classes, cfg.per_class),
            take_per_class(&data.test, &classes, cfg.per_class),
        )
    };
    if train.is_empty() || test.is_empty() {
        return Err(Error::invalid_argument(
            "language recognition needs non-empty train and test sets",
        ));
    }

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &dim in &cfg.dims() {
            let mut encoder = CachedEncoder::new(method, dim)?;
            let mut index = VectorIndex::with_capacity(dim, train.len());
            for (text, label) in train.items() {
                let tokens = document_tokens(text, cfg.ngram, cfg.lowercase)?;
                index.push(&encoder.encode(&tokens), label.clone())?;
            }
            let queries: Vec<FeatureVector> = test
                .items()
                .iter()
                .map(|(text, _)| {
                    document_tokens(text, cfg.ngram, cfg.lowercase).map(|t| encoder.encode(&t))
                })
                .collect::<Result<_>>()?;
            let predictions = classify_batch(&queries, &index)?;
            let correct = predictions
                .iter()
                .zip(test.items())
                .filter(|(c, (_, label))| &c.label == label)
                .count();
            rows.push(ResultRow {
                experiment: "wili".into(),
                method,
                ngram: cfg.ngram,
                dim,
                p: None,
                metric: Metric::Accuracy,
                value: correct as f64 / test.len() as f64,
                trials: 1,
                seed: cfg.seed,
            });
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Spam-filtering metrics per method and dimension: mean ACC, SC, and BH
/// over `trials` seeded 50/50 splits of the corpus.
///
/// SC (resp. BH) is averaged over the trials where the test half contains
/// at least one spam (resp. ham) message; on a corpus where some trials
/// have none, the undefined trials are skipped, and the row is omitted if
/// that never happens.
pub fn run_sms(cfg: &ExperimentConfig, corpus: &LabeledDataset) -> Result<Vec<ResultRow>> {
    cfg.validate()?;
    if corpus.is_empty() {
        return Err(Error::invalid_argument("spam corpus is empty"));
    }

    let mut rows = Vec::new();
    for &method in &cfg.methods {
        for &dim in &cfg.dims() {
            let mut encoder = CachedEncoder::new(method, dim)?;
            let vectors: Vec<FeatureVector> = corpus
                .items()
                .iter()
                .map(|(text, _)| {
                    document_tokens(text, cfg.ngram, cfg.lowercase).map(|t| encoder.encode(&t))
                })
                .collect::<Result<_>>()?;

            let mut acc_sum = 0.0;
            let mut sc = (0.0, 0usize);
            let mut bh = (0.0, 0usize);
            for trial in 0..cfg.trials {
                let mut rng = seeded_rng(cfg.seed.wrapping_add(trial as u64));
                let (train_idx, test_idx) = split_indices(corpus.len(), 0.5, &mut rng)?;

                let mut index = VectorIndex::with_capacity(dim, train_idx.len());
                for &i in &train_idx {
                    index.push(&vectors[i], corpus.items()[i].1.clone())?;
                }
                let queries: Vec<&FeatureVector> = test_idx.iter().map(|&i| &vectors[i]).collect();
                let predictions = classify_batch(&queries, &index)?;
                let predicted: Vec<&str> = predictions.iter().map(|c| c.label.as_str()).collect();
                let truth: Vec<&str> = test_idx
                    .iter()
                    .map(|&i| corpus.items()[i].1.as_str())
                    .collect();

                let report = spam_metrics(&predicted, &truth, SPAM_LABEL)?;
                acc_sum += report.accuracy;
                if report.spam_caught_defined {
                    sc = (sc.0 + report.spam_caught, sc.1 + 1);
                }
                if report.blocked_ham_defined {
                    bh = (bh.0 + report.blocked_ham, bh.1 + 1);
                }
            }

            let mut push = |metric: Metric, value: f64| {
                rows.push(ResultRow {
                    experiment: "sms".into(),
                    method,
                    ngram: cfg.ngram,
                    dim,
                    p: None,
                    metric,
                    value,
                    trials: cfg.trials,
                    seed: cfg.seed,
                })
            };
            push(Metric::Accuracy, acc_sum / cfg.trials as f64);
            if sc.1 > 0 {
                push(Metric::SpamCaught, sc.0 / sc.1 as f64);
            }
            if bh.1 > 0 {
                push(Metric::BlockedHam, bh.0 / bh.1 as f64);
            }
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// Header of the CSV result table.
pub const CSV_HEADER: &str = "experiment,method,n,L,p,metric,value,trials";

/// Writes rows as CSV with the fixed header; the `p` column is empty for
/// non-synthetic rows.
pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        let p = row.p.map(|p| p.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            row.experiment, row.method, row.ngram, row.dim, p, row.metric, row.value, row.trials
        )?;
    }
    Ok(())
}

/// Writes rows as JSON lines (one object per row, including the seed).
pub fn write_json_lines<W: Write>(rows: &[ResultRow], mut out: W) -> io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut out, row)?;
        writeln!(out)?;
    }
    Ok(())
}
