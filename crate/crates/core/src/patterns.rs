//! Connective patterns between a word and a feature, read off the sentences
//! in which both occur. A pattern is the token (or POS) sequence strictly
//! between the two items; it carries no orientation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::corpus::SentenceIndex;
use crate::error::{Error, Result};

pub const DEFAULT_CAP: usize = 10_000;
pub const DEFAULT_MAX_GAP: usize = 5;
pub const DEFAULT_THRESHOLD: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Token,
    Pos,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Token => "token",
            Level::Pos => "pos",
        })
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "token" => Ok(Level::Token),
            "pos" => Ok(Level::Pos),
            other => Err(Error::InvalidArgument(format!(
                "unknown pattern level {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub level: Level,
    pub sequence: Vec<String>,
}

impl Pattern {
    pub fn new<S: Into<String>>(level: Level, sequence: impl IntoIterator<Item = S>) -> Self {
        Pattern {
            level,
            sequence: sequence.into_iter().map(Into::into).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PatternConfig {
    /// Maximum number of shared sentences scanned per pair.
    pub cap: usize,
    /// Longest between-sequence kept.
    pub max_gap: usize,
}

impl Default for PatternConfig {
    fn default() -> Self {
        PatternConfig {
            cap: DEFAULT_CAP,
            max_gap: DEFAULT_MAX_GAP,
        }
    }
}

pub type PatternCounts = HashMap<Pattern, u64>;

/// Multiset of patterns linking `x` and `y`, scanning at most `cfg.cap`
/// shared sentences in ascending id order.
pub fn extract_patterns(
    index: &SentenceIndex,
    x: &str,
    y: &str,
    cfg: PatternConfig,
) -> PatternCounts {
    let mut out = PatternCounts::new();
    for sid in index.shared(x, y).into_iter().take(cfg.cap) {
        let s = index.sentence(sid).expect("posting points at a sentence");
        let xs: Vec<usize> = positions(&s.tokens, x);
        let ys: Vec<usize> = positions(&s.tokens, y);
        for &i in &xs {
            for &j in &ys {
                if i == j {
                    continue;
                }
                let (lo, hi) = (i.min(j), i.max(j));
                if hi - lo - 1 > cfg.max_gap {
                    continue;
                }
                *out.entry(Pattern::new(
                    Level::Token,
                    s.tokens[lo + 1..hi].iter().cloned(),
                ))
                .or_insert(0) += 1;
                if let Some(pos) = &s.pos {
                    *out.entry(Pattern::new(Level::Pos, pos[lo + 1..hi].iter().cloned()))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    out
}

fn positions(tokens: &[String], t: &str) -> Vec<usize> {
    tokens
        .iter()
        .enumerate()
        .filter(|(_, tok)| *tok == t)
        .map(|(i, _)| i)
        .collect()
}

/// Patterns kept for the feature block, indexed by descending frequency.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PatternVocab {
    entries: Vec<(Pattern, u64)>,
    index: HashMap<Pattern, usize>,
    threshold: u64,
}

impl PatternVocab {
    fn from_entries(mut entries: Vec<(Pattern, u64)>, threshold: u64) -> Self {
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (p, _))| (p.clone(), i))
            .collect();
        PatternVocab {
            entries,
            index,
            threshold,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn threshold(&self) -> u64 {
        self.threshold
    }

    pub fn column(&self, p: &Pattern) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn entries(&self) -> &[(Pattern, u64)] {
        &self.entries
    }

    /// TSV rows `pattern<TAB>level<TAB>frequency<TAB>index`; the pattern is
    /// its symbols joined by single spaces (empty for adjacent items).
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for (i, (p, f)) in self.entries.iter().enumerate() {
            writeln!(out, "{}\t{}\t{}\t{}", p.sequence.join(" "), p.level, f, i)?;
        }
        Ok(())
    }

    /// Reads the TSV form. The threshold is not stored in the file and is
    /// taken from the caller.
    pub fn read_tsv<R: BufRead>(input: R, threshold: u64) -> Result<Self> {
        const WHAT: &str = "pattern vocabulary";
        let mut entries = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(WHAT, lineno, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            if f.len() != 4 {
                return Err(Error::parse(
                    WHAT,
                    lineno,
                    "expected 4 tab-separated fields",
                ));
            }
            let level: Level = f[1]
                .parse()
                .map_err(|e: Error| Error::parse(WHAT, lineno, e.to_string()))?;
            let freq: u64 = f[2]
                .parse()
                .map_err(|_| Error::parse(WHAT, lineno, format!("bad frequency {:?}", f[2])))?;
            let idx: usize = f[3]
                .parse()
                .map_err(|_| Error::parse(WHAT, lineno, format!("bad index {:?}", f[3])))?;
            if idx != entries.len() {
                return Err(Error::parse(
                    WHAT,
                    lineno,
                    "indices must be dense and in order",
                ));
            }
            entries.push((Pattern::new(level, f[0].split_whitespace()), freq));
        }
        let vocab = PatternVocab::from_entries(entries.clone(), threshold);
        if vocab.entries != entries {
            return Err(Error::parse(WHAT, 1, "rows are not in frequency order"));
        }
        Ok(vocab)
    }
}

/// Aggregates pattern frequencies over the distinct unordered training
/// pairs and keeps those occurring strictly more than `threshold` times.
pub fn build_pattern_vocab(
    index: &SentenceIndex,
    pairs: &[(String, String)],
    threshold: u64,
    cfg: PatternConfig,
) -> PatternVocab {
    let unique: BTreeSet<(&str, &str)> = pairs
        .iter()
        .map(|(a, b)| {
            if a <= b {
                (a.as_str(), b.as_str())
            } else {
                (b.as_str(), a.as_str())
            }
        })
        .collect();
    let mut total = PatternCounts::new();
    for (a, b) in unique {
        for (p, n) in extract_patterns(index, a, b, cfg) {
            *total.entry(p).or_insert(0) += n;
        }
    }
    let kept = total.into_iter().filter(|(_, n)| *n > threshold).collect();
    PatternVocab::from_entries(kept, threshold)
}

/// How the `(w1, feat)` and `(w2, feat)` frequencies combine into one block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PatternBlockMode {
    /// `freq(w1, f) − freq(w2, f)`, one column per pattern.
    #[default]
    Diff,
    /// `freq(w1, f)` only.
    W1,
    /// `[freq(w1, f) ; freq(w2, f)]`, two columns per pattern.
    Stacked,
}

impl PatternBlockMode {
    pub fn width(self, vocab: &PatternVocab) -> usize {
        match self {
            PatternBlockMode::Stacked => 2 * vocab.len(),
            _ => vocab.len(),
        }
    }
}

impl FromStr for PatternBlockMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diff" => Ok(PatternBlockMode::Diff),
            "w1" => Ok(PatternBlockMode::W1),
            "stacked" => Ok(PatternBlockMode::Stacked),
            other => Err(Error::InvalidArgument(format!(
                "unknown pattern block mode {other:?} (expected diff, w1 or stacked)"
            ))),
        }
    }
}

impl fmt::Display for PatternBlockMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternBlockMode::Diff => "diff",
            PatternBlockMode::W1 => "w1",
            PatternBlockMode::Stacked => "stacked",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    pub dim: usize,
    /// `(column, value)` sorted by column, no explicit zeros.
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        self.write_dense(&mut v);
        v
    }

    pub fn write_dense(&self, out: &mut [f64]) {
        for &(i, x) in &self.entries {
            out[i] = x;
        }
    }
}

fn restrict(vocab: &PatternVocab, counts: &PatternCounts) -> HashMap<usize, f64> {
    counts
        .iter()
        .filter_map(|(p, &n)| vocab.column(p).map(|c| (c, n as f64)))
        .collect()
}

pub fn pattern_feature_block(
    vocab: &PatternVocab,
    index: &SentenceIndex,
    w1: &str,
    w2: &str,
    feat: &str,
    mode: PatternBlockMode,
    cfg: PatternConfig,
) -> SparseVector {
    let a = restrict(vocab, &extract_patterns(index, w1, feat, cfg));
    let mut entries: Vec<(usize, f64)> = match mode {
        PatternBlockMode::W1 => a.into_iter().collect(),
        PatternBlockMode::Diff => {
            let mut d = a;
            for (c, n) in restrict(vocab, &extract_patterns(index, w2, feat, cfg)) {
                *d.entry(c).or_insert(0.0) -= n;
            }
            d.into_iter().filter(|(_, x)| *x != 0.0).collect()
        }
        PatternBlockMode::Stacked => {
            let b = restrict(vocab, &extract_patterns(index, w2, feat, cfg));
            let off = vocab.len();
            a.into_iter()
                .chain(b.into_iter().map(|(c, n)| (c + off, n)))
                .collect()
        }
    };
    entries.sort_by_key(|e| e.0);
    SparseVector {
        dim: mode.width(vocab),
        entries,
    }
}
