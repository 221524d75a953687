//! Task triples, dataset files and training-set construction.

use std::fs;
use std::path::Path;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::Vocab;
use crate::error::{Error, Result};

pub const NEW_VALIDATION_K: usize = 2278;
pub const DEFAULT_SEED: u64 = 20180605;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Triple {
    pub pivot: String,
    pub comparison: String,
    pub feature: String,
    pub label: Option<u8>,
}

impl Triple {
    pub fn new(pivot: &str, comparison: &str, feature: &str, label: Option<u8>) -> Self {
        Triple {
            pivot: pivot.to_string(),
            comparison: comparison.to_string(),
            feature: feature.to_string(),
            label,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub name: String,
    pub triples: Vec<Triple>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, triples: Vec<Triple>) -> Self {
        Dataset {
            name: name.into(),
            triples,
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Labels of every row; errors if any row is unlabeled.
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.triples
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.label.ok_or_else(|| {
                    Error::InvalidArgument(format!("{}: row {} has no label", self.name, i + 1))
                })
            })
            .collect()
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            name: self.name.clone(),
            triples: idx.iter().map(|&i| self.triples[i].clone()).collect(),
        }
    }

    /// `(pivot, feature)` and `(comparison, feature)` for every row.
    pub fn word_feature_pairs(&self) -> Vec<(String, String)> {
        self.triples
            .iter()
            .flat_map(|t| {
                [
                    (t.pivot.clone(), t.feature.clone()),
                    (t.comparison.clone(), t.feature.clone()),
                ]
            })
            .collect()
    }

    /// Comma-separated rows `pivot,comparison,feature[,label]`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            out.push_str(&format!("{},{},{}", t.pivot, t.comparison, t.feature));
            if let Some(l) = t.label {
                out.push_str(&format!(",{l}"));
            }
            out.push('\n');
        }
        out
    }
}

fn normalize(field: &str) -> String {
    field.trim().to_lowercase()
}

/// Parses triples. The first row fixes the arity: 4 fields (labeled) or 3
/// (unlabeled); every later row must match. Blank lines are skipped.
pub fn parse_triples(name: &str, text: &str) -> Result<Dataset> {
    const WHAT: &str = "triples";
    let mut arity = None;
    let mut triples = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !(3..=4).contains(&fields.len()) {
            return Err(Error::parse(
                WHAT,
                lineno,
                format!("expected 3 or 4 fields, found {}", fields.len()),
            ));
        }
        let expected = *arity.get_or_insert(fields.len());
        if fields.len() != expected {
            return Err(Error::parse(
                WHAT,
                lineno,
                format!("expected {expected} fields, found {}", fields.len()),
            ));
        }
        let words: Vec<String> = fields[..3].iter().map(|f| normalize(f)).collect();
        if words.iter().any(String::is_empty) {
            return Err(Error::parse(WHAT, lineno, "empty word"));
        }
        let label = match fields.get(3).map(|l| l.trim()) {
            None => None,
            Some("0") => Some(0),
            Some("1") => Some(1),
            Some(other) => return Err(Error::parse(WHAT, lineno, format!("bad label {other:?}"))),
        };
        triples.push(Triple::new(&words[0], &words[1], &words[2], label));
    }
    Ok(Dataset::new(name, triples))
}

pub fn load_triples(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path.file_stem().map_or_else(
        || "dataset".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    parse_triples(&name, &text)
}

/// `val` followed by `k` rows drawn from `train` without replacement.
/// The drawn rows keep their original relative order.
pub fn build_new_validation(
    train: &Dataset,
    val: &Dataset,
    k: usize,
    seed: u64,
) -> Result<Dataset> {
    if k > train.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot draw {k} rows from a training set of {}",
            train.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = sample(&mut rng, train.len(), k).into_vec();
    picked.sort_unstable();
    let mut triples = val.triples.clone();
    triples.extend(picked.into_iter().map(|i| train.triples[i].clone()));
    Ok(Dataset::new("new_validation", triples))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub name: String,
    pub rows: usize,
    pub mean_pivot: f64,
    pub mean_comparison: f64,
    pub mean_feature: f64,
}

/// Mean corpus frequency of the word in each triple position.
pub fn dataset_stats(dataset: &Dataset, vocab: &Vocab) -> DatasetStats {
    let n = dataset.len();
    let mean = |get: fn(&Triple) -> &str| {
        if n == 0 {
            return 0.0;
        }
        dataset
            .triples
            .iter()
            .map(|t| vocab.frequency(get(t)) as f64)
            .sum::<f64>()
            / n as f64
    };
    DatasetStats {
        name: dataset.name.clone(),
        rows: n,
        mean_pivot: mean(|t| &t.pivot),
        mean_comparison: mean(|t| &t.comparison),
        mean_feature: mean(|t| &t.feature),
    }
}
