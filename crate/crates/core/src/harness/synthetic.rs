//! Generated benchmark where the answer is recoverable from co-occurrence:
//! every concept is mentioned next to each of its attributes and never next
//! to anything else. Positive triples pair a concept that has the attribute
//! with one that lacks it; negatives pair two concepts that both have it or
//! both lack it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Sentence;
use crate::embeddings::EmbeddingTable;
use crate::harness::dataset::{Dataset, Triple};

#[derive(Debug, Clone, Copy)]
pub struct SyntheticConfig {
    pub concepts: usize,
    pub attributes: usize,
    pub attrs_per_concept: usize,
    pub fillers: usize,
    /// Sentences per (concept, attribute) link.
    pub mentions: usize,
    /// Filler-only sentences per content word.
    pub background: usize,
    pub triples: usize,
    pub dim: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            concepts: 150,
            attributes: 60,
            attrs_per_concept: 6,
            fillers: 50,
            mentions: 4,
            background: 2,
            triples: 2000,
            dim: 8,
            seed: 7,
        }
    }
}

pub struct SyntheticBenchmark {
    /// Pre-tagged sentences (`token/POS` when written out).
    pub corpus: Vec<Sentence>,
    pub embeddings: EmbeddingTable,
    pub dataset: Dataset,
}

const CONNECTIVES: [(&str, &str); 4] = [
    ("has", "VBZ"),
    ("with", "IN"),
    ("shows", "VBZ"),
    ("of", "IN"),
];

impl SyntheticBenchmark {
    pub fn generate(cfg: &SyntheticConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let concept = |i: usize| format!("concept{i:03}");
        let attr = |i: usize| format!("attr{i:03}");
        let filler = |i: usize| format!("filler{i:02}");

        let attrs: Vec<usize> = (0..cfg.attributes).collect();
        let has: Vec<Vec<bool>> = (0..cfg.concepts)
            .map(|_| {
                let mut row = vec![false; cfg.attributes];
                for &a in attrs.choose_multiple(&mut rng, cfg.attrs_per_concept) {
                    row[a] = true;
                }
                row
            })
            .collect();

        let mut corpus = Vec::new();
        let mut push = |words: Vec<(String, &str)>| {
            let (tokens, pos): (Vec<String>, Vec<String>) =
                words.into_iter().map(|(w, p)| (w, p.to_string())).unzip();
            corpus.push(Sentence {
                tokens,
                pos: Some(pos),
            });
        };
        let fill = |rng: &mut ChaCha8Rng, n: usize| -> Vec<(String, &'static str)> {
            (0..n)
                .map(|_| (filler(rng.gen_range(0..cfg.fillers)), "DT"))
                .collect()
        };
        for (c, row) in has.iter().enumerate() {
            for (a, _) in row.iter().enumerate().filter(|(_, &h)| h) {
                for _ in 0..cfg.mentions {
                    let (conn, tag) = CONNECTIVES[rng.gen_range(0..CONNECTIVES.len())];
                    let n = rng.gen_range(0..3);
                    let mut s = fill(&mut rng, n);
                    s.push((concept(c), "NN"));
                    s.push((conn.to_string(), tag));
                    s.push((attr(a), "JJ"));
                    let n = rng.gen_range(0..3);
                    s.extend(fill(&mut rng, n));
                    push(s);
                }
            }
        }
        for (word, tag) in (0..cfg.concepts)
            .map(|c| (concept(c), "NN"))
            .chain((0..cfg.attributes).map(|a| (attr(a), "JJ")))
        {
            for _ in 0..cfg.background {
                let mut s = fill(&mut rng, 2);
                s.push((word.clone(), tag));
                s.extend(fill(&mut rng, 2));
                push(s);
            }
        }
        corpus.shuffle(&mut rng);

        let mut embeddings = EmbeddingTable::new(cfg.dim);
        let random_vec = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..cfg.dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
        };
        let attr_vecs: Vec<Vec<f64>> = (0..cfg.attributes).map(|_| random_vec(&mut rng)).collect();
        for (a, v) in attr_vecs.iter().enumerate() {
            embeddings.insert(attr(a), v).expect("dimension");
        }
        for (c, row) in has.iter().enumerate() {
            let mut v: Vec<f64> = random_vec(&mut rng).iter().map(|x| 0.3 * x).collect();
            for (a, _) in row.iter().enumerate().filter(|(_, &h)| h) {
                for (x, y) in v.iter_mut().zip(&attr_vecs[a]) {
                    *x += y / cfg.attrs_per_concept as f64;
                }
            }
            embeddings.insert(concept(c), &v).expect("dimension");
        }
        for f in 0..cfg.fillers {
            let v = random_vec(&mut rng);
            embeddings.insert(filler(f), &v).expect("dimension");
        }

        let mut triples = Vec::with_capacity(cfg.triples);
        while triples.len() < cfg.triples {
            let positive = triples.len() % 2 == 0;
            let a = rng.gen_range(0..cfg.attributes);
            let with: Vec<usize> = (0..cfg.concepts).filter(|&c| has[c][a]).collect();
            let without: Vec<usize> = (0..cfg.concepts).filter(|&c| !has[c][a]).collect();
            let pair = if positive {
                with.choose(&mut rng).zip(without.choose(&mut rng))
            } else if rng.gen_bool(0.5) {
                let two: Vec<_> = with.choose_multiple(&mut rng, 2).collect();
                (two.len() == 2).then(|| (two[0], two[1]))
            } else {
                let two: Vec<_> = without.choose_multiple(&mut rng, 2).collect();
                (two.len() == 2).then(|| (two[0], two[1]))
            };
            if let Some((&c1, &c2)) = pair {
                triples.push(Triple::new(
                    &concept(c1),
                    &concept(c2),
                    &attr(a),
                    Some(positive as u8),
                ));
            }
        }

        SyntheticBenchmark {
            corpus,
            embeddings,
            dataset: Dataset::new("synthetic", triples),
        }
    }

    /// Corpus as tagged text, one sentence per line.
    pub fn corpus_text(&self) -> String {
        let mut out = String::new();
        for s in &self.corpus {
            let pos = s.pos.as_ref().expect("synthetic corpus is tagged");
            let line: Vec<String> = s
                .tokens
                .iter()
                .zip(pos)
                .map(|(t, p)| format!("{t}/{p}"))
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Embeddings in the text format with a `<count> <dim>` header.
    pub fn embeddings_text(&self) -> String {
        let mut rows: Vec<String> = Vec::new();
        let mut tokens: Vec<&str> = Vec::new();
        for s in &self.corpus {
            for t in &s.tokens {
                if self.embeddings.contains(t) && !tokens.contains(&t.as_str()) {
                    tokens.push(t);
                }
            }
        }
        tokens.sort_unstable();
        for t in &tokens {
            let v: Vec<String> = self
                .embeddings
                .vector(t)
                .iter()
                .map(|x| format!("{x}"))
                .collect();
            rows.push(format!("{t} {}", v.join(" ")));
        }
        format!(
            "{} {}\n{}\n",
            tokens.len(),
            self.embeddings.dim(),
            rows.join("\n")
        )
    }
}
