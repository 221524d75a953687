//! Feature and prediction CSV files.

use std::fs::File;
use std::path::Path;

use anyhow::{bail, Context, Result};

use discrim::gbt::Matrix;
use discrim::harness::{FeaturePipeline, Triple};

pub const KEY_COLUMNS: [&str; 4] = ["pivot", "comparison", "feature", "label"];

fn label_field(l: Option<u8>) -> String {
    l.map_or_else(String::new, |l| l.to_string())
}

pub fn write_features(path: &Path, pipeline: &FeaturePipeline, triples: &[Triple]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<String> = KEY_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(pipeline.columns());
    w.write_record(&header)?;
    let x = pipeline.matrix(triples);
    let mut record = Vec::with_capacity(header.len());
    for (i, t) in triples.iter().enumerate() {
        record.clear();
        record.extend([
            t.pivot.clone(),
            t.comparison.clone(),
            t.feature.clone(),
            label_field(t.label),
        ]);
        record.extend(x.row(i).iter().map(|v| v.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub struct FeatureTable {
    pub columns: Vec<String>,
    pub triples: Vec<Triple>,
    pub x: Matrix,
}

impl FeatureTable {
    pub fn labels(&self) -> Result<Vec<u8>> {
        self.triples
            .iter()
            .enumerate()
            .map(|(i, t)| {
                t.label
                    .with_context(|| format!("row {} has no label", i + 1))
            })
            .collect()
    }
}

pub fn read_features(path: &Path) -> Result<FeatureTable> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers()?.clone();
    if header.len() < 4 || header.iter().take(4).ne(KEY_COLUMNS) {
        bail!(
            "{}: header must start with {}",
            path.display(),
            KEY_COLUMNS.join(",")
        );
    }
    let columns: Vec<String> = header.iter().skip(4).map(str::to_string).collect();
    let mut triples = Vec::new();
    let mut data = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        let label = match &rec[3] {
            "" => None,
            "0" => Some(0),
            "1" => Some(1),
            other => bail!("{}: row {}: bad label {other:?}", path.display(), i + 2),
        };
        triples.push(Triple::new(&rec[0], &rec[1], &rec[2], label));
        for v in rec.iter().skip(4) {
            data.push(
                v.parse::<f64>().with_context(|| {
                    format!("{}: row {}: bad value {v:?}", path.display(), i + 2)
                })?,
            );
        }
    }
    let x = Matrix::new(triples.len(), columns.len(), data)?;
    Ok(FeatureTable {
        columns,
        triples,
        x,
    })
}

pub struct Prediction {
    pub triple: Triple,
    pub prob: f64,
    pub pred: u8,
}

pub fn write_predictions(path: &Path, rows: &[Prediction]) -> Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["pivot", "comparison", "feature", "label", "prob", "pred"])?;
    for p in rows {
        let t = &p.triple;
        w.write_record([
            t.pivot.as_str(),
            &t.comparison,
            &t.feature,
            &label_field(t.label),
            &p.prob.to_string(),
            &p.pred.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `(gold, pred)` columns of a predictions file; gold may be missing.
pub fn read_predictions(path: &Path) -> Result<(Vec<Option<u8>>, Vec<u8>)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut r = csv::Reader::from_reader(file);
    let header = r.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .with_context(|| format!("{}: no {name} column", path.display()))
    };
    let (gi, pi) = (col("label")?, col("pred")?);
    let (mut gold, mut pred) = (Vec::new(), Vec::new());
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| -> Result<u8> {
            match s {
                "0" => Ok(0),
                "1" => Ok(1),
                _ => bail!(
                    "{}: row {}: expected 0 or 1, got {s:?}",
                    path.display(),
                    i + 2
                ),
            }
        };
        gold.push(if rec[gi].is_empty() {
            None
        } else {
            Some(parse(&rec[gi])?)
        });
        pred.push(parse(&rec[pi])?);
    }
    Ok((gold, pred))
}
