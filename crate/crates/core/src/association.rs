//! PPMI / PLMI over a [`CoocTable`] and the 13-value co-occurrence block.
//!
//! Probabilities come from co-occurrence mass: `P(w, c) = count(w, c) / T`
//! and `P(w) = marginal(w) / T`. Logs are base 2. Unseen pairs have no PMI
//! and contribute 0 to both positive measures.

use crate::corpus::CoocTable;

pub const LOG_BASE: f64 = 2.0;

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `log2(n * total / (row * col))`, or `None` when the pair is unseen or a
/// marginal is zero.
///
/// The ratio is reduced to lowest terms before conversion to floating point,
/// so scaling every input count by the same factor gives a bit-identical
/// result.
pub fn pmi_from_counts(n: u64, row: u64, col: u64, total: u64) -> Option<f64> {
    if n == 0 || row == 0 || col == 0 || total == 0 {
        return None;
    }
    let num = n as u128 * total as u128;
    let den = row as u128 * col as u128;
    let g = gcd(num, den);
    Some(((num / g) as f64 / (den / g) as f64).log2())
}

/// PLMI from raw counts: `max(0, n * pmi)`.
///
/// The product is formed from `n / s` with `s` the common divisor of all
/// four counts and then scaled by `s`, so multiplying every count by `k`
/// multiplies the result by exactly `k` whenever `s` is a power of two.
pub fn plmi_from_counts(n: u64, row: u64, col: u64, total: u64) -> f64 {
    match pmi_from_counts(n, row, col, total) {
        Some(p) if p > 0.0 => {
            let s = gcd(gcd(n as u128, row as u128), gcd(col as u128, total as u128)) as u64;
            s as f64 * ((n / s) as f64 * p)
        }
        _ => 0.0,
    }
}

pub fn pmi(table: &CoocTable, w: &str, c: &str) -> Option<f64> {
    let (wi, ci) = (table.id(w)?, table.id(c)?);
    pmi_from_counts(
        table.count_ids(wi, ci),
        table.marginal_id(wi),
        table.marginal_id(ci),
        table.total_mass(),
    )
}

pub fn ppmi(table: &CoocTable, w: &str, c: &str) -> f64 {
    pmi(table, w, c).map_or(0.0, |p| p.max(0.0))
}

pub fn plmi(table: &CoocTable, w: &str, c: &str) -> f64 {
    let (Some(wi), Some(ci)) = (table.id(w), table.id(c)) else {
        return 0.0;
    };
    plmi_from_counts(
        table.count_ids(wi, ci),
        table.marginal_id(wi),
        table.marginal_id(ci),
        table.total_mass(),
    )
}

pub const COOC_WIDTH: usize = 13;

pub const COOC_COLUMNS: [&str; COOC_WIDTH] = [
    "cooc_w1_f",
    "count_w1",
    "count_f",
    "ppmi_w1_f",
    "plmi_w1_f",
    "cooc_w2_f",
    "count_w2",
    "count_f_2",
    "ppmi_w2_f",
    "plmi_w2_f",
    "cooc_diff",
    "ppmi_diff",
    "plmi_diff",
];

/// `[cnt(w1,f), cnt(w1), cnt(f), ppmi(w1,f), plmi(w1,f),
///   cnt(w2,f), cnt(w2), cnt(f), ppmi(w2,f), plmi(w2,f),
///   cnt diff, ppmi diff, plmi diff]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoocFeatureBlock(pub [f64; COOC_WIDTH]);

fn word_feat(table: &CoocTable, w: &str, f: &str) -> [f64; 5] {
    [
        table.count(w, f) as f64,
        table.marginal(w) as f64,
        table.marginal(f) as f64,
        ppmi(table, w, f),
        plmi(table, w, f),
    ]
}

pub fn cooc_feature_block(table: &CoocTable, w1: &str, w2: &str, feat: &str) -> CoocFeatureBlock {
    let a = word_feat(table, w1, feat);
    let b = word_feat(table, w2, feat);
    let mut v = [0.0; COOC_WIDTH];
    v[..5].copy_from_slice(&a);
    v[5..10].copy_from_slice(&b);
    v[10] = a[0] - b[0];
    v[11] = a[3] - b[3];
    v[12] = a[4] - b[4];
    CoocFeatureBlock(v)
}
