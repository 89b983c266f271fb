//! Dataset plumbing: synthetic random strings with probabilistic
//! perturbation, loaders for the language-identification and SMS corpora,
//! and seeded train/test splitting.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::{Error, Result};

/// The reproducible generator used throughout: ChaCha with 8 rounds, whose
/// stream is specified by the algorithm and therefore stable across
/// platforms and releases. Identical seeds give identical streams.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// A string of `len` characters drawn i.i.d. uniform from 'a'..='z'.
pub fn gen_random_string(len: usize, rng: &mut impl Rng) -> Result<String> {
    if len == 0 {
        return Err(Error::invalid_argument("string length must be at least 1"));
    }
    Ok((0..len)
        .map(|_| char::from(b'a' + rng.random_range(0..26u8)))
        .collect())
}

const PRINTABLE_LO: u8 = 33;
const PRINTABLE_HI: u8 = 126;

/// Each character is independently replaced, with probability `p`, by a
/// printable ASCII character (codes 33..=126) other than itself. Length in
/// characters is preserved; `p` = 0 returns the input unchanged and `p` = 1
/// changes every position.
pub fn perturb(s: &str, p: f64, rng: &mut impl Rng) -> Result<String> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid_argument(format!(
            "perturbation probability must lie in [0, 1], got {p}"
        )));
    }
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        if rng.random::<f64>() < p {
            out.push(replacement_char(c, rng));
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

fn replacement_char(original: char, rng: &mut impl Rng) -> char {
    let span = PRINTABLE_HI - PRINTABLE_LO + 1;
    if original.is_ascii() && (PRINTABLE_LO..=PRINTABLE_HI).contains(&(original as u8)) {
        // Draw from the 93 printable codes that are not the original.
        let draw = PRINTABLE_LO + rng.random_range(0..span - 1);
        char::from(if draw >= original as u8 {
            draw + 1
        } else {
            draw
        })
    } else {
        char::from(PRINTABLE_LO + rng.random_range(0..span))
    }
}

/// Ordered (text, label) pairs with the distinct class ids in order of
/// first appearance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDataset {
    items: Vec<(String, String)>,
    classes: Vec<String>,
}

impl LabeledDataset {
    pub fn from_items(items: Vec<(String, String)>) -> Self {
        let mut seen = HashSet::new();
        let mut classes = Vec::new();
        for (_, label) in &items {
            if seen.insert(label.clone()) {
                classes.push(label.clone());
            }
        }
        LabeledDataset { items, classes }
    }

    pub fn items(&self) -> &[(String, String)] {
        &self.items
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Number of items carrying the given label.
    pub fn class_count(&self, label: &str) -> usize {
        self.items.iter().filter(|(_, l)| l == label).count()
    }
}

/// Train and test halves of a language-identification corpus.
#[derive(Debug, Clone)]
pub struct WiliDataset {
    pub train: LabeledDataset,
    pub test: LabeledDataset,
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let content = fs::read_to_string(path).map_err(|e| Error::DataLoad {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(content.lines().map(str::to_owned).collect())
}

fn paired_dataset(dir: &Path, x_name: &str, y_name: &str) -> Result<LabeledDataset> {
    let x_path = dir.join(x_name);
    let y_path = dir.join(y_name);
    let texts = read_lines(&x_path)?;
    let labels = read_lines(&y_path)?;
    if texts.len() != labels.len() {
        return Err(Error::DataLoad {
            path: x_path,
            reason: format!(
                "{} lines in {x_name} but {} lines in {y_name}",
                texts.len(),
                labels.len()
            ),
        });
    }
    Ok(LabeledDataset::from_items(
        texts.into_iter().zip(labels).collect(),
    ))
}

/// Loads a directory in the WiLI-2018 layout: `x_train.txt`, `y_train.txt`,
/// `x_test.txt`, `y_test.txt`, UTF-8, one paragraph or label per line,
/// aligned by line number.
pub fn load_wili(dir: &Path) -> Result<WiliDataset> {
    Ok(WiliDataset {
        train: paired_dataset(dir, "x_train.txt", "y_train.txt")?,
        test: paired_dataset(dir, "x_test.txt", "y_test.txt")?,
    })
}

/// Loads a spam corpus: UTF-8, one record per line, `label<TAB>text` with
/// label `ham` or `spam`.
pub fn load_sms(path: &Path) -> Result<LabeledDataset> {
    let content = fs::read_to_string(path).map_err(|e| Error::DataLoad {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    let mut items = Vec::new();
    for (i, line) in content.lines().enumerate() {
        let (label, text) = line.split_once('\t').ok_or_else(|| Error::DataFormat {
            path: path.to_path_buf(),
            line: i + 1,
            reason: "expected `label<TAB>text`".into(),
        })?;
        if label != "ham" && label != "spam" {
            return Err(Error::DataFormat {
                path: path.to_path_buf(),
                line: i + 1,
                reason: format!("unknown label {label:?}, expected `ham` or `spam`"),
            });
        }
        items.push((text.to_owned(), label.to_owned()));
    }
    Ok(LabeledDataset::from_items(items))
}

/// Uniform random permutation of `0..n` cut after ⌈fraction·n⌉ elements.
pub fn split_indices(
    n: usize,
    fraction: f64,
    rng: &mut impl Rng,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::invalid_argument(format!(
            "split fraction must lie strictly inside (0, 1), got {fraction}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid_argument("cannot split an empty dataset"));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(rng);
    let train_size = ((fraction * n as f64).ceil() as usize).min(n);
    let test = indices.split_off(train_size);
    Ok((indices, test))
}

/// Randomly partitions the dataset: the first ⌈fraction·N⌉ elements of a
/// seeded permutation go to train, the rest to test.
pub fn split(
    ds: &LabeledDataset,
    fraction: f64,
    rng: &mut impl Rng,
) -> Result<(LabeledDataset, LabeledDataset)> {
    let (train_idx, test_idx) = split_indices(ds.len(), fraction, rng)?;
    let pick = |idx: &[usize]| {
        LabeledDataset::from_items(idx.iter().map(|&i| ds.items()[i].clone()).collect())
    };
    Ok((pick(&train_idx), pick(&test_idx)))
}

/// The lexicographically first `k` class labels present in the dataset.
pub fn first_classes(ds: &LabeledDataset, k: usize) -> Vec<String> {
    let mut classes = ds.classes().to_vec();
    classes.sort();
    classes.truncate(k);
    classes
}

/// Keeps, for each listed class, the first `per_class` items in file order.
pub fn take_per_class(ds: &LabeledDataset, classes: &[String], per_class: usize) -> LabeledDataset {
    let wanted: HashSet<&String> = classes.iter().collect();
    let mut taken: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    let mut items = Vec::new();
    for (text, label) in ds.items() {
        if wanted.contains(label) {
            let count = taken.entry(label.as_str()).or_insert(0);
            if *count < per_class {
                *count += 1;
                items.push((text.clone(), label.clone()));
            }
        }
    }
    LabeledDataset::from_items(items)
}

/// Resolves a dataset path against an override environment variable.
pub fn data_path(env_var: &str, default: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os(env_var)
        .map(PathBuf::from)
        .unwrap_or_else(|| default.into())
}
