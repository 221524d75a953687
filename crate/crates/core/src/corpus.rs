//! Corpus ingestion: tokenization, vocabulary, windowed co-occurrence
//! counting and the sentence index used for pattern extraction.
//!
//! A corpus is plain UTF-8 text with one sentence per line. Lines may be
//! pre-tagged, in which case every whitespace field has the form
//! `token/POS`. Co-occurrence never crosses a sentence boundary.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, Read, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Sentences per shard when counting in parallel.
const SHARD_SENTENCES: usize = 2048;

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation()
        || matches!(c as u32,
            0x2010..=0x2027 | 0x2030..=0x205E | 0x3001..=0x3003 | 0x3008..=0x3011 | 0xFF01..=0xFF0F)
        || matches!(c, '¡' | '§' | '«' | '¶' | '·' | '»' | '¿')
}

fn normalize(field: &str) -> String {
    field.trim_matches(is_punct).to_lowercase()
}

/// Lowercases, splits on Unicode whitespace and strips leading/trailing
/// punctuation. Internal punctuation is kept and empty tokens are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(normalize)
        .filter(|t| !t.is_empty())
        .collect()
}

/// Byte-level entry point; reports the offset of the first invalid byte.
pub fn tokenize_bytes(bytes: &[u8]) -> Result<Vec<String>> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Decode {
        offset: e.valid_up_to(),
    })?;
    Ok(tokenize(text))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Sentence {
    pub tokens: Vec<String>,
    /// Present only for pre-tagged corpora; parallel to `tokens`.
    pub pos: Option<Vec<String>>,
}

impl Sentence {
    pub fn from_tokens<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Self {
        Sentence {
            tokens: tokens.into_iter().map(Into::into).collect(),
            pos: None,
        }
    }

    pub fn parse(line: &str, tagged: bool) -> Self {
        if !tagged {
            return Sentence {
                tokens: tokenize(line),
                pos: None,
            };
        }
        let mut tokens = Vec::new();
        let mut pos = Vec::new();
        for field in line.split_whitespace() {
            let (tok, tag) = match field.rfind('/') {
                Some(i) if i > 0 && i + 1 < field.len() => (&field[..i], &field[i + 1..]),
                _ => (field, "_"),
            };
            let tok = normalize(tok);
            if tok.is_empty() {
                continue;
            }
            tokens.push(tok);
            pos.push(tag.to_string());
        }
        Sentence {
            tokens,
            pos: Some(pos),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn parse_corpus(text: &str, tagged: bool) -> Vec<Sentence> {
    text.lines().map(|l| Sentence::parse(l, tagged)).collect()
}

/// Reads a corpus file. Empty lines are kept as empty sentences so that
/// sentence ids match line numbers.
pub fn read_corpus(path: impl AsRef<Path>, tagged: bool) -> Result<Vec<Sentence>> {
    let path = path.as_ref();
    let mut bytes = Vec::new();
    fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Decode {
        offset: e.valid_up_to(),
    })?;
    Ok(parse_corpus(text, tagged))
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocab {
    tokens: Vec<String>,
    freqs: Vec<u64>,
    ids: HashMap<String, u32>,
    total_tokens: u64,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    /// Corpus frequency, 0 for tokens outside the vocabulary.
    pub fn frequency(&self, token: &str) -> u64 {
        self.id(token).map_or(0, |id| self.freqs[id as usize])
    }

    /// All tokens seen while building, including those below `min_count`.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> + '_ {
        self.tokens
            .iter()
            .zip(&self.freqs)
            .map(|(t, &f)| (t.as_str(), f))
    }
}

pub fn build_vocab(corpus: &[Sentence], min_count: u64) -> Result<Vocab> {
    if min_count < 1 {
        return Err(Error::InvalidArgument("min_count must be >= 1".into()));
    }
    let mut order: Vec<&str> = Vec::new();
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let mut total = 0u64;
    for sentence in corpus {
        for tok in &sentence.tokens {
            total += 1;
            let c = counts.entry(tok.as_str()).or_insert_with(|| {
                order.push(tok.as_str());
                0
            });
            *c += 1;
        }
    }
    let mut vocab = Vocab {
        total_tokens: total,
        ..Vocab::default()
    };
    for tok in order {
        let f = counts[tok];
        if f >= min_count {
            vocab.ids.insert(tok.to_string(), vocab.tokens.len() as u32);
            vocab.tokens.push(tok.to_string());
            vocab.freqs.push(f);
        }
    }
    Ok(vocab)
}

type PairCounts = HashMap<(u32, u32), u64>;

/// Symmetric windowed co-occurrence counts with marginals.
///
/// `count(a, b)` is the number of ordered position pairs `(i, j)`, `i != j`,
/// `|i - j| <= window`, with `a` at `i` and `b` at `j`. Tables built from a
/// corpus also keep directional counts, which the distributional graph needs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoocTable {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
    pairs: PairCounts,
    /// `(w, c)` → occurrences of `c` to the left of `w` within the window.
    left: Option<PairCounts>,
    marginal: Vec<u64>,
    total_mass: u64,
    window: usize,
}

fn count_left(sentences: &[Sentence], vocab: &Vocab, window: usize) -> PairCounts {
    let mut left = PairCounts::new();
    let mut ids: Vec<Option<u32>> = Vec::new();
    for sentence in sentences {
        ids.clear();
        ids.extend(sentence.tokens.iter().map(|t| vocab.id(t)));
        for (i, a) in ids.iter().enumerate() {
            let Some(a) = *a else { continue };
            let end = (i + window + 1).min(ids.len());
            for b in &ids[i + 1..end] {
                if let Some(b) = *b {
                    // a sits to the left of b
                    *left.entry((b, a)).or_insert(0) += 1;
                }
            }
        }
    }
    left
}

fn merge_into(acc: &mut PairCounts, other: PairCounts) {
    for (k, v) in other {
        *acc.entry(k).or_insert(0) += v;
    }
}

impl CoocTable {
    fn from_left(vocab: &Vocab, left: PairCounts, window: usize) -> Self {
        let mut pairs = PairCounts::with_capacity(left.len() * 2);
        let mut marginal = vec![0u64; vocab.len()];
        let mut total_mass = 0u64;
        for (&(w, c), &n) in &left {
            *pairs.entry((w, c)).or_insert(0) += n;
            *pairs.entry((c, w)).or_insert(0) += n;
            marginal[w as usize] += n;
            marginal[c as usize] += n;
            total_mass += 2 * n;
        }
        CoocTable {
            tokens: vocab.tokens.clone(),
            ids: vocab.ids.clone(),
            pairs,
            left: Some(left),
            marginal,
            total_mass,
            window,
        }
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn total_mass(&self) -> u64 {
        self.total_mass
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> &str {
        &self.tokens[id as usize]
    }

    pub fn num_tokens(&self) -> usize {
        self.tokens.len()
    }

    pub fn count_ids(&self, a: u32, b: u32) -> u64 {
        self.pairs.get(&(a, b)).copied().unwrap_or(0)
    }

    pub fn count(&self, a: &str, b: &str) -> u64 {
        match (self.id(a), self.id(b)) {
            (Some(a), Some(b)) => self.count_ids(a, b),
            _ => 0,
        }
    }

    pub fn marginal_id(&self, id: u32) -> u64 {
        self.marginal[id as usize]
    }

    pub fn marginal(&self, token: &str) -> u64 {
        self.id(token).map_or(0, |id| self.marginal_id(id))
    }

    /// Stored pairs as `(a, b, count)` over token ids, both orders present.
    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32, u64)> + '_ {
        self.pairs.iter().map(|(&(a, b), &n)| (a, b, n))
    }

    pub fn num_pairs(&self) -> usize {
        self.pairs.len()
    }

    /// Directional counts `(w, c, n)`: `c` seen `n` times to the left of `w`.
    /// `None` for tables loaded from TSV.
    pub fn left_pairs(&self) -> Option<impl Iterator<Item = (u32, u32, u64)> + '_> {
        self.left
            .as_ref()
            .map(|l| l.iter().map(|(&(w, c), &n)| (w, c, n)))
    }

    pub fn has_directional(&self) -> bool {
        self.left.is_some()
    }

    /// Token-level view sorted by `(word, context)`; handy for comparing
    /// tables whose id spaces differ.
    pub fn sorted_rows(&self) -> Vec<(&str, &str, u64)> {
        let mut rows: Vec<_> = self
            .pairs
            .iter()
            .map(|(&(a, b), &n)| (self.token(a), self.token(b), n))
            .collect();
        rows.sort_unstable();
        rows
    }

    /// TSV: header `#window=<k> total=<T>`, then `word<TAB>context<TAB>count`
    /// sorted by `(word, context)`.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "#window={} total={}", self.window, self.total_mass)?;
        for (a, b, n) in self.sorted_rows() {
            writeln!(out, "{a}\t{b}\t{n}")?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(input: R) -> Result<Self> {
        const WHAT: &str = "co-occurrence table";
        let mut lines = input.lines().enumerate();
        let header = match lines.next() {
            Some((_, l)) => l.map_err(|e| Error::parse(WHAT, 1, e.to_string()))?,
            None => return Err(Error::parse(WHAT, 1, "missing header")),
        };
        let (window, total) = parse_header(&header).ok_or_else(|| {
            Error::parse(
                WHAT,
                1,
                format!("expected `#window=<k> total=<T>`, got {header:?}"),
            )
        })?;

        let mut tokens = Vec::new();
        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut intern = |t: &str| -> u32 {
            if let Some(&id) = ids.get(t) {
                return id;
            }
            let id = tokens.len() as u32;
            tokens.push(t.to_string());
            ids.insert(t.to_string(), id);
            id
        };
        let mut pairs = PairCounts::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(WHAT, lineno, e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let mut f = line.split('\t');
            let (Some(a), Some(b), Some(n), None) = (f.next(), f.next(), f.next(), f.next()) else {
                return Err(Error::parse(
                    WHAT,
                    lineno,
                    "expected 3 tab-separated fields",
                ));
            };
            let n: u64 = n
                .parse()
                .map_err(|_| Error::parse(WHAT, lineno, format!("bad count {n:?}")))?;
            let key = (intern(a), intern(b));
            if pairs.insert(key, n).is_some() {
                return Err(Error::parse(WHAT, lineno, "duplicate pair"));
            }
        }
        let mut marginal = vec![0u64; tokens.len()];
        for (&(a, _), &n) in &pairs {
            marginal[a as usize] += n;
        }
        let sum: u64 = marginal.iter().sum();
        if sum != total {
            return Err(Error::parse(
                WHAT,
                1,
                format!("header total {total} disagrees with row sum {sum}"),
            ));
        }
        Ok(CoocTable {
            tokens,
            ids,
            pairs,
            left: None,
            marginal,
            total_mass: total,
            window,
        })
    }
}

fn parse_header(line: &str) -> Option<(usize, u64)> {
    let rest = line.strip_prefix('#')?;
    let mut window = None;
    let mut total = None;
    for kv in rest.split_whitespace() {
        let (k, v) = kv.split_once('=')?;
        match k {
            "window" => window = v.parse().ok(),
            "total" => total = v.parse().ok(),
            _ => {}
        }
    }
    Some((window?, total?))
}

/// Counts co-occurrences, sharding sentences across threads. The result is
/// identical to [`count_cooccurrences_sequential`].
pub fn count_cooccurrences(corpus: &[Sentence], vocab: &Vocab, window: usize) -> Result<CoocTable> {
    check_window(window)?;
    let left = corpus
        .par_chunks(SHARD_SENTENCES)
        .map(|chunk| count_left(chunk, vocab, window))
        .reduce(PairCounts::new, |mut a, b| {
            if a.len() < b.len() {
                let mut b = b;
                merge_into(&mut b, a);
                return b;
            }
            merge_into(&mut a, b);
            a
        });
    Ok(CoocTable::from_left(vocab, left, window))
}

pub fn count_cooccurrences_sequential(
    corpus: &[Sentence],
    vocab: &Vocab,
    window: usize,
) -> Result<CoocTable> {
    check_window(window)?;
    Ok(CoocTable::from_left(
        vocab,
        count_left(corpus, vocab, window),
        window,
    ))
}

fn check_window(window: usize) -> Result<()> {
    if window == 0 {
        return Err(Error::InvalidArgument("window must be >= 1".into()));
    }
    Ok(())
}

/// Sentences plus an inverted index from token to sorted sentence ids.
#[derive(Debug, Clone, Default)]
pub struct SentenceIndex {
    sentences: Vec<Sentence>,
    postings: HashMap<String, Vec<u32>>,
}

impl SentenceIndex {
    pub fn new(sentences: Vec<Sentence>) -> Self {
        let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
        for (id, s) in sentences.iter().enumerate() {
            let id = id as u32;
            for tok in &s.tokens {
                let list = postings.entry(tok.clone()).or_default();
                if list.last() != Some(&id) {
                    list.push(id);
                }
            }
        }
        SentenceIndex {
            sentences,
            postings,
        }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentence(&self, id: u32) -> Option<&Sentence> {
        self.sentences.get(id as usize)
    }

    pub fn lookup(&self, token: &str) -> &[u32] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn is_tagged(&self) -> bool {
        self.sentences.iter().any(|s| s.pos.is_some())
    }

    /// Ids of sentences containing both tokens, ascending.
    pub fn shared(&self, x: &str, y: &str) -> Vec<u32> {
        let (a, b) = (self.lookup(x), self.lookup(y));
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }
}

pub fn index_sentences(corpus: Vec<Sentence>) -> SentenceIndex {
    SentenceIndex::new(corpus)
}

pub fn read_corpus_lines<R: BufRead>(input: R, tagged: bool) -> Result<Vec<Sentence>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::parse("corpus", i + 1, e.to_string()))?;
        out.push(Sentence::parse(&line, tagged));
    }
    Ok(out)
}
