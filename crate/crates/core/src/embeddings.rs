//! Pretrained word vectors and the offset-cosine / concatenation blocks.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;

use crate::error::{Error, Result};

/// Token → vector table. Tokens outside the table read as the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    ids: HashMap<String, usize>,
    data: Vec<f64>,
    zero: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            ids: HashMap::new(),
            data: Vec::new(),
            zero: vec![0.0; dim],
        }
    }

    /// Inserts or replaces a vector.
    pub fn insert(&mut self, token: impl Into<String>, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument(
                "embedding values must be finite".into(),
            ));
        }
        let token = token.into();
        match self.ids.get(&token) {
            Some(&i) => self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.ids.insert(token, self.ids.len());
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.ids.contains_key(token)
    }

    pub fn get(&self, token: &str) -> Option<&[f64]> {
        self.ids
            .get(token)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// The stored vector, or zeros for an unknown token.
    pub fn vector(&self, token: &str) -> &[f64] {
        self.get(token).unwrap_or(&self.zero)
    }

    /// Reads `token v1 .. vd` rows with an optional `<count> <dim>` header.
    /// Files ending in `.gz` are decompressed.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let reader: Box<dyn Read> = if path.extension().is_some_and(|e| e == "gz") {
            Box::new(MultiGzDecoder::new(file))
        } else {
            Box::new(file)
        };
        Self::read(BufReader::new(reader))
    }

    pub fn read<R: BufRead>(input: R) -> Result<Self> {
        const WHAT: &str = "embeddings";
        let mut table: Option<EmbeddingTable> = None;
        let mut values = Vec::new();
        for (i, line) in input.lines().enumerate() {
            let lineno = i + 1;
            let line = line.map_err(|e| Error::parse(WHAT, lineno, e.to_string()))?;
            let mut fields = line.split_whitespace();
            let Some(token) = fields.next() else { continue };
            if lineno == 1 && is_header(&line) {
                continue;
            }
            values.clear();
            for f in fields {
                let v: f64 = f
                    .parse()
                    .map_err(|_| Error::parse(WHAT, lineno, format!("bad value {f:?}")))?;
                if !v.is_finite() {
                    return Err(Error::parse(
                        WHAT,
                        lineno,
                        format!("non-finite value {f:?}"),
                    ));
                }
                values.push(v);
            }
            let t = table.get_or_insert_with(|| EmbeddingTable::new(values.len()));
            if values.is_empty() || values.len() != t.dim {
                return Err(Error::parse(
                    WHAT,
                    lineno,
                    format!("expected {} values, found {}", t.dim, values.len()),
                ));
            }
            t.insert(token, &values)?;
        }
        table.ok_or_else(|| Error::parse(WHAT, 1, "no vectors"))
    }
}

fn is_header(line: &str) -> bool {
    let f: Vec<&str> = line.split_whitespace().collect();
    f.len() == 2 && f.iter().all(|x| x.parse::<usize>().is_ok())
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0, 0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub const OFFSET_WIDTH: usize = 5;

pub const OFFSET_COLUMNS: [&str; OFFSET_WIDTH] = [
    "cos_w1-w2_f",
    "cos_w1-f_w2-f",
    "cos_w1-f_w2",
    "cos_w2-f_w1",
    "cos_w1_w2",
];

/// `[cos(w1−w2, f), cos(w1−f, w2−f), cos(w1−f, w2), cos(w2−f, w1), cos(w1, w2)]`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetFeatureBlock(pub [f64; OFFSET_WIDTH]);

pub fn offset_feature_block(
    emb: &EmbeddingTable,
    w1: &str,
    w2: &str,
    feat: &str,
) -> OffsetFeatureBlock {
    let (a, b, f) = (emb.vector(w1), emb.vector(w2), emb.vector(feat));
    // all rows share the table's dimension, so cosine cannot fail here
    let cos = |u: &[f64], v: &[f64]| cosine(u, v).unwrap_or(0.0);
    let (af, bf) = (sub(a, f), sub(b, f));
    OffsetFeatureBlock([
        cos(&sub(a, b), f),
        cos(&af, &bf),
        cos(&af, b),
        cos(&bf, a),
        cos(a, b),
    ])
}

/// `vec(w1) ⊕ vec(w2) ⊕ vec(f)`, zeros for unknown tokens.
pub fn concat_block(emb: &EmbeddingTable, w1: &str, w2: &str, feat: &str) -> Vec<f64> {
    let mut out = Vec::with_capacity(3 * emb.dim());
    for t in [w1, w2, feat] {
        out.extend_from_slice(emb.vector(t));
    }
    out
}

pub fn concat_columns(dim: usize) -> Vec<String> {
    ["w1", "w2", "f"]
        .iter()
        .flat_map(|slot| (0..dim).map(move |i| format!("vec_{slot}_{i}")))
        .collect()
}
