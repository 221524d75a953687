//! Brute-force reference implementations used by the integration and
//! acceptance tests. Nothing here calls into the library's counting,
//! association or graph code.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use discrim::corpus::Sentence;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random sentences over a vocabulary `w0 .. w{vocab-1}` with a skewed draw
/// so some words are frequent and some rare.
pub fn random_corpus(
    rng: &mut ChaCha8Rng,
    max_tokens: usize,
    vocab: usize,
    max_len: usize,
) -> Vec<Sentence> {
    let mut out = Vec::new();
    let mut used = 0;
    while used < max_tokens {
        let len = rng.gen_range(0..=max_len).min(max_tokens - used);
        let toks: Vec<String> = (0..len)
            .map(|_| {
                let r: f64 = rng.gen();
                format!("w{}", ((r * r) * vocab as f64) as usize)
            })
            .collect();
        used += len.max(1);
        out.push(Sentence::from_tokens(toks));
    }
    out
}

fn euclid(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        euclid(b, a % b)
    }
}

/// `n * x` evaluated as `s * ((n / s) * x)` where `s` divides `n` and every
/// value in `others`.
pub fn reduced_product(n: u64, others: &[u64], x: f64) -> f64 {
    let s = others.iter().fold(n, |g, &v| euclid(g, v));
    s as f64 * ((n / s) as f64 * x)
}

pub type Pairs = HashMap<(String, String), u64>;

pub struct BruteCooc {
    pub pairs: Pairs,
    pub marginal: HashMap<String, u64>,
    pub total: u64,
}

/// Enumerates every ordered position pair within the window.
pub fn brute_cooc(corpus: &[Sentence], window: usize, keep: &dyn Fn(&str) -> bool) -> BruteCooc {
    let mut pairs = Pairs::new();
    for s in corpus {
        let t = &s.tokens;
        for i in 0..t.len() {
            for j in 0..t.len() {
                if i != j && i.abs_diff(j) <= window && keep(&t[i]) && keep(&t[j]) {
                    *pairs.entry((t[i].clone(), t[j].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    let mut marginal = HashMap::new();
    let mut total = 0;
    for ((a, _), n) in &pairs {
        *marginal.entry(a.clone()).or_insert(0) += n;
        total += n;
    }
    BruteCooc {
        pairs,
        marginal,
        total,
    }
}

impl BruteCooc {
    pub fn count(&self, a: &str, b: &str) -> u64 {
        self.pairs
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn marginal(&self, a: &str) -> u64 {
        self.marginal.get(a).copied().unwrap_or(0)
    }

    pub fn ppmi(&self, a: &str, b: &str) -> f64 {
        let n = self.count(a, b);
        if n == 0 {
            return 0.0;
        }
        let pmi = ((n * self.total) as f64 / (self.marginal(a) * self.marginal(b)) as f64).log2();
        pmi.max(0.0)
    }

    pub fn plmi(&self, a: &str, b: &str) -> f64 {
        let n = self.count(a, b);
        if n == 0 {
            return 0.0;
        }
        reduced_product(
            n,
            &[self.marginal(a), self.marginal(b), self.total],
            self.ppmi(a, b),
        )
    }

    pub fn block(&self, w1: &str, w2: &str, f: &str) -> [f64; 13] {
        let c1 = self.count(w1, f) as f64;
        let c2 = self.count(w2, f) as f64;
        let (p1, p2) = (self.ppmi(w1, f), self.ppmi(w2, f));
        let (l1, l2) = (self.plmi(w1, f), self.plmi(w2, f));
        let cf = self.marginal(f) as f64;
        [
            c1,
            self.marginal(w1) as f64,
            cf,
            p1,
            l1,
            c2,
            self.marginal(w2) as f64,
            cf,
            p2,
            l2,
            c1 - c2,
            p1 - p2,
            l1 - l2,
        ]
    }
}

/// `(lexical, tag, score)` in rank order.
pub type Ranked = Vec<(String, String, f64)>;

/// Directional PLMI contexts, fully sorted, then truncated to `p`.
pub fn brute_graph(corpus: &[Sentence], window: usize, p: usize) -> BTreeMap<String, Ranked> {
    let mut counts: HashMap<(String, String, String), u64> = HashMap::new();
    let mut words: HashSet<String> = HashSet::new();
    for s in corpus {
        let t = &s.tokens;
        for i in 0..t.len() {
            words.insert(t[i].clone());
            for j in 0..t.len() {
                if i != j && i.abs_diff(j) <= window {
                    let tag = if j < i { "L" } else { "R" };
                    *counts
                        .entry((t[i].clone(), t[j].clone(), tag.to_string()))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    let mut row: HashMap<&str, u64> = HashMap::new();
    let mut col: HashMap<(&str, &str), u64> = HashMap::new();
    let mut total = 0;
    for ((w, c, t), n) in &counts {
        *row.entry(w).or_insert(0) += n;
        *col.entry((c, t)).or_insert(0) += n;
        total += n;
    }
    let mut out: BTreeMap<String, Ranked> = words.into_iter().map(|w| (w, Vec::new())).collect();
    for ((w, c, t), &n) in &counts {
        let ratio = (n * total) as f64 / (row[w.as_str()] * col[&(c.as_str(), t.as_str())]) as f64;
        let pmi = ratio.log2();
        if pmi > 0.0 {
            let score = reduced_product(
                n,
                &[row[w.as_str()], col[&(c.as_str(), t.as_str())], total],
                pmi,
            );
            out.get_mut(w).unwrap().push((c.clone(), t.clone(), score));
        }
    }
    for list in out.values_mut() {
        list.sort_by(|a, b| {
            b.2.partial_cmp(&a.2)
                .unwrap()
                .then_with(|| (&a.0, &a.1).cmp(&(&b.0, &b.1)))
        });
        list.truncate(p);
    }
    out
}

pub fn brute_overlap(g: &BTreeMap<String, Ranked>, a: &str, b: &str) -> usize {
    let key = |r: &(String, String, f64)| (r.0.clone(), r.1.clone());
    let sa: HashSet<_> = g.get(a).into_iter().flatten().map(key).collect();
    let sb: HashSet<_> = g.get(b).into_iter().flatten().map(key).collect();
    sa.intersection(&sb).count()
}

pub fn brute_neighbors(g: &BTreeMap<String, Ranked>, w: &str, k: usize) -> Vec<(String, usize)> {
    let mut all: Vec<(String, usize)> = g
        .keys()
        .filter(|o| o.as_str() != w)
        .map(|o| (o.clone(), brute_overlap(g, w, o)))
        .filter(|(_, n)| *n > 0)
        .collect();
    all.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Prof {
    pub found: bool,
    pub best: i64,
    pub worst: i64,
    pub score: f64,
    pub occ: u32,
}

const MISS: Prof = Prof {
    found: false,
    best: -1,
    worst: -1,
    score: 0.0,
    occ: 0,
};

pub fn brute_profile(g: &BTreeMap<String, Ranked>, target: &str, feat: &str) -> Prof {
    let ranks: Vec<(i64, f64)> = g
        .get(target)
        .into_iter()
        .flatten()
        .enumerate()
        .filter(|(_, r)| r.0 == feat)
        .map(|(i, r)| (i as i64 + 1, r.2))
        .collect();
    if ranks.is_empty() {
        return MISS;
    }
    Prof {
        found: true,
        best: ranks.iter().map(|r| r.0).min().unwrap(),
        worst: ranks.iter().map(|r| r.0).max().unwrap(),
        score: ranks.iter().map(|r| r.1).sum(),
        occ: ranks.len() as u32,
    }
}

fn eight(p1: (Prof, i64), p2: (Prof, i64), slot: usize) -> [f64; 8] {
    let rank_bit = p1.0.found && (!p2.0.found || p1.0.best < p2.0.best);
    let score_bit = p1.0.score > p2.0.score;
    let (c, via) = if score_bit { p1 } else { p2 };
    let mut which = [0.0, 0.0];
    if slot > 0 {
        which[slot - 1] = via as f64;
    }
    [
        if rank_bit { 1.0 } else { 0.0 },
        if score_bit { 1.0 } else { 0.0 },
        c.score,
        c.best as f64,
        c.worst as f64,
        c.occ as f64,
        which[0],
        which[1],
    ]
}

pub fn brute_jobim(g: &BTreeMap<String, Ranked>, w1: &str, w2: &str, f: &str) -> [f64; 24] {
    let direct = |w: &str| brute_profile(g, w, f);
    let by_word = |w: &str| {
        let d = direct(w);
        if d.found {
            return (d, 0);
        }
        for (r, (nb, _)) in brute_neighbors(g, w, 10).iter().enumerate() {
            let p = brute_profile(g, nb, f);
            if p.found {
                return (p, r as i64 + 1);
            }
        }
        (MISS, -1)
    };
    let fnb = brute_neighbors(g, f, 10);
    let by_feat = |w: &str| {
        let d = direct(w);
        if d.found {
            return (d, 0);
        }
        for (r, (nb, _)) in fnb.iter().enumerate() {
            let p = brute_profile(g, nb, w);
            if p.found {
                return (p, r as i64 + 1);
            }
        }
        (MISS, -1)
    };
    let mut v = [0.0; 24];
    v[..8].copy_from_slice(&eight((direct(w1), 0), (direct(w2), 0), 0));
    v[8..16].copy_from_slice(&eight(by_word(w1), by_word(w2), 1));
    v[16..].copy_from_slice(&eight(by_feat(w1), by_feat(w2), 2));
    v
}

/// 200 points in the unit square labeled by `x + y > 0`, keeping a margin
/// of 0.05 around the boundary.
pub fn separable_fixture(seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
    let mut r = rng(seed);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    while xs.len() < 200 {
        let (a, b): (f64, f64) = (r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
        if (a + b).abs() < 0.05 {
            continue;
        }
        xs.push(vec![a, b]);
        ys.push((a + b > 0.0) as u8);
    }
    (xs, ys)
}

/// Every resource the feature groups read, built from a synthetic
/// benchmark with the pattern vocabulary restricted to `train`.
pub fn synthetic_resources(
    bench: &discrim::harness::SyntheticBenchmark,
    train: &discrim::harness::Dataset,
    pattern_threshold: u64,
) -> discrim::harness::Resources {
    use discrim::corpus::{build_vocab, count_cooccurrences, index_sentences};
    use discrim::graph::{build_graph, DEFAULT_P};
    use discrim::patterns::{build_pattern_vocab, PatternConfig};
    use std::sync::Arc;

    let vocab = build_vocab(&bench.corpus, 1).unwrap();
    let cooc = count_cooccurrences(&bench.corpus, &vocab, 2).unwrap();
    let graph = build_graph(&cooc, DEFAULT_P).unwrap();
    let index = index_sentences(bench.corpus.clone());
    let cfg = PatternConfig::default();
    let patterns = build_pattern_vocab(&index, &train.word_feature_pairs(), pattern_threshold, cfg);
    discrim::harness::Resources {
        cooc: Some(Arc::new(cooc)),
        embeddings: Some(Arc::new(bench.embeddings.clone())),
        graph: Some(Arc::new(graph)),
        index: Some(Arc::new(index)),
        patterns: Some(Arc::new(patterns)),
        pattern_mode: Default::default(),
        pattern_config: cfg,
    }
}
