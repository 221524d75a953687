//! Gradient-boosted regression trees with binary logistic loss.
//!
//! Trees are grown level by level with exact greedy split search over every
//! feature and every midpoint between consecutive distinct values. Leaves
//! use the second-order Newton step `-G / (H + lambda)`; the stored weight
//! is unscaled and the learning rate is applied at prediction time.
//!
//! Ties between candidate splits go to the lowest feature index and, within
//! a feature, the lowest threshold, so training is fully deterministic and
//! independent of the thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODEL_FORMAT: &str = "discrim-gbt";
pub const MODEL_VERSION: u32 = 1;

/// Prior clamp keeping the base score finite on one-class data.
const PRIOR_EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    pub rounds: usize,
    pub max_depth: usize,
    pub eta: f64,
    pub lambda: f64,
    pub gamma: f64,
    pub min_child_weight: f64,
    pub seed: u64,
}

impl Default for GbtParams {
    fn default() -> Self {
        GbtParams {
            rounds: 100,
            max_depth: 6,
            eta: 0.3,
            lambda: 1.0,
            gamma: 0.0,
            min_child_weight: 1.0,
            seed: 0,
        }
    }
}

impl GbtParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.rounds < 1 {
            return bad("rounds must be >= 1");
        }
        if self.max_depth < 1 {
            return bad("max_depth must be >= 1");
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad("eta must be in (0, 1]");
        }
        if !(self.lambda >= 0.0 && self.gamma >= 0.0 && self.min_child_weight >= 0.0) {
            return bad("lambda, gamma and min_child_weight must be >= 0");
        }
        Ok(())
    }
}

/// Second-order gain of splitting a node into (L, R).
pub fn split_gain(gl: f64, hl: f64, gr: f64, hr: f64, lambda: f64, gamma: f64) -> f64 {
    let score = |g: f64, h: f64| g * g / (h + lambda);
    0.5 * (score(gl, hl) + score(gr, hr) - score(gl + gr, hl + hr)) - gamma
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Node {
    /// Rows with `x[feature] < threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        weight: f64,
    },
}

/// Node 0 is the root; children always have larger indices than parents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn leaf_index(&self, x: &[f64]) -> usize {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf { .. } => return i,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] < threshold { left } else { right },
            }
        }
    }

    pub fn leaf_weight(&self, x: &[f64]) -> f64 {
        match self.nodes[self.leaf_index(x)] {
            Node::Leaf { weight } => weight,
            Node::Split { .. } => unreachable!(),
        }
    }

    pub fn depth(&self) -> usize {
        fn go(t: &Tree, i: usize) -> usize {
            match t.nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + go(t, left).max(go(t, right)),
            }
        }
        go(self, 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtModel {
    pub format: String,
    pub version: u32,
    pub params: GbtParams,
    pub num_features: usize,
    pub base_score: f64,
    pub trees: Vec<Tree>,
}

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                expected: rows * cols,
                got: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::Dimension {
                    expected: cols,
                    got: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    /// Rows selected by index, in the given order.
    pub fn select(&self, idx: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    gain: f64,
    feature: usize,
    threshold: f64,
}

fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m > lo {
        m
    } else {
        hi
    }
}

struct Grower<'a> {
    cols: &'a [Vec<f64>],
    order: &'a [Vec<u32>],
    params: &'a GbtParams,
}

impl Grower<'_> {
    /// Grows one tree and returns it with the leaf each row landed in.
    fn grow(&self, grad: &[f64], hess: &[f64]) -> (Tree, Vec<usize>) {
        let n = grad.len();
        let p = self.params;
        let mut nodes = vec![Node::Leaf { weight: 0.0 }];
        let mut node_of = vec![0usize; n];
        let mut active = vec![0usize];

        for _depth in 0..p.max_depth {
            if active.is_empty() {
                break;
            }
            // slot per active node
            let mut slot_of = vec![usize::MAX; nodes.len()];
            for (s, &id) in active.iter().enumerate() {
                slot_of[id] = s;
            }
            let mut g_tot = vec![0.0; active.len()];
            let mut h_tot = vec![0.0; active.len()];
            for i in 0..n {
                let s = slot_of[node_of[i]];
                if s != usize::MAX {
                    g_tot[s] += grad[i];
                    h_tot[s] += hess[i];
                }
            }

            let per_feature: Vec<Vec<Option<Candidate>>> = (0..self.cols.len())
                .into_par_iter()
                .map(|f| self.scan_feature(f, grad, hess, &node_of, &slot_of, &g_tot, &h_tot))
                .collect();
            let mut best: Vec<Option<Candidate>> = vec![None; active.len()];
            for cands in per_feature {
                for (b, c) in best.iter_mut().zip(cands) {
                    if let Some(c) = c {
                        if b.is_none_or(|b| c.gain > b.gain) {
                            *b = Some(c);
                        }
                    }
                }
            }

            let mut next = Vec::new();
            let mut children = vec![None; nodes.len()];
            for (s, &id) in active.iter().enumerate() {
                let Some(c) = best[s] else { continue };
                if c.gain.is_nan() || c.gain <= 0.0 {
                    continue;
                }
                let left = nodes.len();
                nodes.push(Node::Leaf { weight: 0.0 });
                nodes.push(Node::Leaf { weight: 0.0 });
                nodes[id] = Node::Split {
                    feature: c.feature,
                    threshold: c.threshold,
                    left,
                    right: left + 1,
                };
                children[id] = Some((c.feature, c.threshold, left));
                next.push(left);
                next.push(left + 1);
            }
            for i in 0..n {
                if let Some((f, t, left)) = children[node_of[i]] {
                    node_of[i] = if self.cols[f][i] < t { left } else { left + 1 };
                }
            }
            active = next;
        }

        let mut g = vec![0.0; nodes.len()];
        let mut h = vec![0.0; nodes.len()];
        for i in 0..n {
            g[node_of[i]] += grad[i];
            h[node_of[i]] += hess[i];
        }
        for (id, node) in nodes.iter_mut().enumerate() {
            if let Node::Leaf { weight } = node {
                let denom = h[id] + p.lambda;
                *weight = if denom > 0.0 { -g[id] / denom } else { 0.0 };
            }
        }
        (Tree { nodes }, node_of)
    }

    #[allow(clippy::too_many_arguments)]
    fn scan_feature(
        &self,
        f: usize,
        grad: &[f64],
        hess: &[f64],
        node_of: &[usize],
        slot_of: &[usize],
        g_tot: &[f64],
        h_tot: &[f64],
    ) -> Vec<Option<Candidate>> {
        let p = self.params;
        let slots = g_tot.len();
        let mut gl = vec![0.0; slots];
        let mut hl = vec![0.0; slots];
        let mut last: Vec<Option<f64>> = vec![None; slots];
        let mut best: Vec<Option<Candidate>> = vec![None; slots];
        let col = &self.cols[f];
        for &i in &self.order[f] {
            let i = i as usize;
            let s = slot_of[node_of[i]];
            if s == usize::MAX {
                continue;
            }
            let v = col[i];
            if let Some(lv) = last[s] {
                if v > lv {
                    let (hr, gr) = (h_tot[s] - hl[s], g_tot[s] - gl[s]);
                    if hl[s] >= p.min_child_weight && hr >= p.min_child_weight {
                        let gain = split_gain(gl[s], hl[s], gr, hr, p.lambda, p.gamma);
                        if best[s].is_none_or(|b| gain > b.gain) {
                            best[s] = Some(Candidate {
                                gain,
                                feature: f,
                                threshold: midpoint(lv, v),
                            });
                        }
                    }
                }
            }
            gl[s] += grad[i];
            hl[s] += hess[i];
            last[s] = Some(v);
        }
        best
    }
}

/// Mean logistic loss of margins against 0/1 labels.
pub fn log_loss(margins: &[f64], labels: &[u8]) -> f64 {
    let sum: f64 = margins
        .iter()
        .zip(labels)
        .map(|(&m, &y)| {
            // log(1 + e^m) - y*m, computed stably
            let softplus = if m > 0.0 {
                m + (-m).exp().ln_1p()
            } else {
                m.exp().ln_1p()
            };
            softplus - y as f64 * m
        })
        .sum();
    sum / margins.len() as f64
}

pub fn train(x: &Matrix, y: &[u8], params: &GbtParams) -> Result<GbtModel> {
    train_with_history(x, y, params).map(|(m, _)| m)
}

/// Trains and also returns the training log loss after each round.
pub fn train_with_history(
    x: &Matrix,
    y: &[u8],
    params: &GbtParams,
) -> Result<(GbtModel, Vec<f64>)> {
    params.validate()?;
    let n = x.rows();
    if n == 0 || y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "need matching non-empty rows and labels, got {} rows and {} labels",
            n,
            y.len()
        )));
    }
    if y.iter().any(|&l| l > 1) {
        return Err(Error::InvalidArgument("labels must be 0 or 1".into()));
    }
    if x.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("features must be finite".into()));
    }

    let positives = y.iter().filter(|&&l| l == 1).count();
    let prior = (positives as f64 / n as f64).clamp(PRIOR_EPS, 1.0 - PRIOR_EPS);
    let base_score = (prior / (1.0 - prior)).ln();
    let mut model = GbtModel {
        format: MODEL_FORMAT.to_string(),
        version: MODEL_VERSION,
        params: *params,
        num_features: x.cols(),
        base_score,
        trees: Vec::new(),
    };
    let mut margin = vec![base_score; n];
    let mut history = Vec::new();
    if positives == 0 || positives == n {
        return Ok((model, history));
    }

    let cols: Vec<Vec<f64>> = (0..x.cols())
        .map(|j| (0..n).map(|i| x.get(i, j)).collect())
        .collect();
    let order: Vec<Vec<u32>> = cols
        .par_iter()
        .map(|col| {
            let mut idx: Vec<u32> = (0..n as u32).collect();
            idx.sort_by(|&a, &b| col[a as usize].total_cmp(&col[b as usize]).then(a.cmp(&b)));
            idx
        })
        .collect();
    let grower = Grower {
        cols: &cols,
        order: &order,
        params,
    };

    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    for _ in 0..params.rounds {
        for i in 0..n {
            let p = sigmoid(margin[i]);
            grad[i] = p - y[i] as f64;
            hess[i] = p * (1.0 - p);
        }
        let (tree, leaf_of) = grower.grow(&grad, &hess);
        for i in 0..n {
            if let Node::Leaf { weight } = tree.nodes[leaf_of[i]] {
                margin[i] += params.eta * weight;
            }
        }
        history.push(log_loss(&margin, y));
        model.trees.push(tree);
    }
    Ok((model, history))
}

impl GbtModel {
    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.num_features {
            return Err(Error::Dimension {
                expected: self.num_features,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn predict_margin(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        let eta = self.params.eta;
        Ok(self
            .trees
            .iter()
            .fold(self.base_score, |m, t| m + eta * t.leaf_weight(x)))
    }

    pub fn predict_prob(&self, x: &[f64]) -> Result<f64> {
        self.predict_margin(x).map(sigmoid)
    }

    pub fn predict_label(&self, x: &[f64]) -> Result<u8> {
        self.predict_prob(x).map(|p| (p >= 0.5) as u8)
    }

    pub fn predict_probs(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.num_features {
            return Err(Error::Dimension {
                expected: self.num_features,
                got: x.cols(),
            });
        }
        (0..x.rows())
            .into_par_iter()
            .map(|i| self.predict_prob(x.row(i)))
            .collect()
    }

    pub fn predict_labels(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self
            .predict_probs(x)?
            .into_iter()
            .map(|p| (p >= 0.5) as u8)
            .collect())
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec(self).expect("model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let m: GbtModel = serde_json::from_slice(bytes).map_err(|e| Error::Model(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Model(m));
        if self.format != MODEL_FORMAT {
            return bad(format!("unknown format {:?}", self.format));
        }
        if self.version != MODEL_VERSION {
            return bad(format!("unsupported version {}", self.version));
        }
        self.params
            .validate()
            .map_err(|e| Error::Model(e.to_string()))?;
        if !self.base_score.is_finite() {
            return bad("base_score must be finite".into());
        }
        for (t, tree) in self.trees.iter().enumerate() {
            if tree.nodes.is_empty() {
                return bad(format!("tree {t} has no nodes"));
            }
            for (i, node) in tree.nodes.iter().enumerate() {
                match *node {
                    Node::Leaf { weight } if !weight.is_finite() => {
                        return bad(format!("tree {t} node {i}: non-finite weight"));
                    }
                    Node::Split {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        if feature >= self.num_features || !threshold.is_finite() {
                            return bad(format!("tree {t} node {i}: bad feature or threshold"));
                        }
                        for c in [left, right] {
                            if c <= i || c >= tree.nodes.len() {
                                return bad(format!("tree {t} node {i}: bad child {c}"));
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}
