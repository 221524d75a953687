//! Stratified k-fold cross-validation.

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gbt::{train, GbtParams, Matrix};
use crate::harness::metrics::{evaluate, Metrics};

/// Fold id per row. Each class is shuffled under `seed`, then rows are dealt
/// round-robin, negatives first, so fold sizes differ by at most one and
/// every fold's class counts are within one of proportional.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidArgument("folds must be >= 2".into()));
    }
    if labels.len() < folds {
        return Err(Error::InvalidArgument(format!(
            "{} rows cannot fill {folds} folds",
            labels.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in [0u8, 1] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        rows.shuffle(&mut rng);
        for i in rows {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// Seeded shuffle split; the first `round(n * train_frac)` shuffled rows
/// train, the rest test. Both index lists come back sorted.
pub fn train_test_split(n: usize, train_frac: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let cut = ((n as f64) * train_frac.clamp(0.0, 1.0)).round() as usize;
    let mut train = idx[..cut].to_vec();
    let mut test = idx[cut..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone, Serialize)]
pub struct CvReport {
    pub folds: Vec<Metrics>,
    pub mean_macro_f1: f64,
    pub mean_positive_f1: f64,
}

pub fn cross_validate(
    x: &Matrix,
    y: &[u8],
    params: &GbtParams,
    folds: usize,
    seed: u64,
) -> Result<CvReport> {
    if x.rows() != y.len() {
        return Err(Error::Dimension {
            expected: x.rows(),
            got: y.len(),
        });
    }
    let assignment = stratified_folds(y, folds, seed)?;
    let results: Vec<Metrics> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let train_idx: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != k).collect();
            let test_idx: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == k).collect();
            let ytr: Vec<u8> = train_idx.iter().map(|&i| y[i]).collect();
            if !ytr.contains(&0) || !ytr.contains(&1) {
                warn!("fold {k}: training split holds a single class");
            }
            let model = train(&x.select(&train_idx), &ytr, params)?;
            let pred = model.predict_labels(&x.select(&test_idx))?;
            let gold: Vec<u8> = test_idx.iter().map(|&i| y[i]).collect();
            evaluate(&pred, &gold)
        })
        .collect::<Result<_>>()?;
    let n = results.len() as f64;
    Ok(CvReport {
        mean_macro_f1: results.iter().map(|m| m.macro_f1).sum::<f64>() / n,
        mean_positive_f1: results.iter().map(|m| m.positive.f1).sum::<f64>() / n,
        folds: results,
    })
}
