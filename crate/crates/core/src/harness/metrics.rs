//! Confusion-matrix metrics for the binary task.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// `tp`/`fp`/`fn`/`tn` are from the positive class's point of view.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub negative: ClassMetrics,
    pub positive: ClassMetrics,
    pub macro_f1: f64,
    pub accuracy: f64,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn class(tp: usize, fp: usize, fn_: usize) -> ClassMetrics {
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    ClassMetrics {
        precision,
        recall,
        f1,
        support: tp + fn_,
    }
}

pub fn evaluate(pred: &[u8], gold: &[u8]) -> Result<Metrics> {
    if pred.len() != gold.len() {
        return Err(Error::Dimension {
            expected: gold.len(),
            got: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot evaluate zero predictions".into(),
        ));
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in pred.iter().zip(gold) {
        match (p, g) {
            (1, 1) => tp += 1,
            (1, 0) => fp += 1,
            (0, 1) => fn_ += 1,
            (0, 0) => tn += 1,
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "labels must be 0 or 1, got ({p}, {g})"
                )))
            }
        }
    }
    let positive = class(tp, fp, fn_);
    let negative = class(tn, fn_, fp);
    Ok(Metrics {
        tp,
        fp,
        fn_,
        tn,
        negative,
        positive,
        macro_f1: (positive.f1 + negative.f1) / 2.0,
        accuracy: ratio(tp + tn, gold.len()),
    })
}
