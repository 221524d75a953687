//! Feature groups behind a common trait, looked up by name.
//!
//! Each group turns a triple into a fixed-width block. A [`GroupMask`]
//! selects groups by name; the assembled vector always follows the
//! registry's order (`cooc`, `offset`, `concat`, `jobim`, `patterns`)
//! regardless of how the mask was written.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::association::{cooc_feature_block, COOC_COLUMNS, COOC_WIDTH};
use crate::corpus::{CoocTable, SentenceIndex};
use crate::embeddings::{
    concat_block, concat_columns, offset_feature_block, EmbeddingTable, OFFSET_COLUMNS,
    OFFSET_WIDTH,
};
use crate::error::{Error, Result};
use crate::gbt::Matrix;
use crate::graph::{jobim_columns, DistributionalGraph, JOBIM_WIDTH};
use crate::harness::dataset::Triple;
use crate::patterns::{pattern_feature_block, PatternBlockMode, PatternConfig, PatternVocab};

pub trait FeatureGroup: Send + Sync {
    fn name(&self) -> &'static str;
    fn width(&self) -> usize;
    fn columns(&self) -> Vec<String>;
    /// Appends exactly `width()` values.
    fn extract(&self, t: &Triple, out: &mut Vec<f64>);
}

/// Everything the groups may read. Only the groups in the mask need their
/// resource present.
#[derive(Clone, Default)]
pub struct Resources {
    pub cooc: Option<Arc<CoocTable>>,
    pub embeddings: Option<Arc<EmbeddingTable>>,
    pub graph: Option<Arc<DistributionalGraph>>,
    pub index: Option<Arc<SentenceIndex>>,
    pub patterns: Option<Arc<PatternVocab>>,
    pub pattern_mode: PatternBlockMode,
    pub pattern_config: PatternConfig,
}

fn need<'a, T>(r: &'a Option<Arc<T>>, group: &str, what: &str) -> Result<&'a T> {
    r.as_deref()
        .ok_or_else(|| Error::Config(format!("feature group `{group}` needs {what}")))
}

struct Cooc<'a>(&'a CoocTable);

impl FeatureGroup for Cooc<'_> {
    fn name(&self) -> &'static str {
        "cooc"
    }
    fn width(&self) -> usize {
        COOC_WIDTH
    }
    fn columns(&self) -> Vec<String> {
        COOC_COLUMNS.iter().map(|s| s.to_string()).collect()
    }
    fn extract(&self, t: &Triple, out: &mut Vec<f64>) {
        out.extend_from_slice(&cooc_feature_block(self.0, &t.pivot, &t.comparison, &t.feature).0);
    }
}

struct Offset<'a>(&'a EmbeddingTable);

impl FeatureGroup for Offset<'_> {
    fn name(&self) -> &'static str {
        "offset"
    }
    fn width(&self) -> usize {
        OFFSET_WIDTH
    }
    fn columns(&self) -> Vec<String> {
        OFFSET_COLUMNS.iter().map(|s| s.to_string()).collect()
    }
    fn extract(&self, t: &Triple, out: &mut Vec<f64>) {
        out.extend_from_slice(&offset_feature_block(self.0, &t.pivot, &t.comparison, &t.feature).0);
    }
}

struct Concat<'a>(&'a EmbeddingTable);

impl FeatureGroup for Concat<'_> {
    fn name(&self) -> &'static str {
        "concat"
    }
    fn width(&self) -> usize {
        3 * self.0.dim()
    }
    fn columns(&self) -> Vec<String> {
        concat_columns(self.0.dim())
    }
    fn extract(&self, t: &Triple, out: &mut Vec<f64>) {
        out.extend(concat_block(self.0, &t.pivot, &t.comparison, &t.feature));
    }
}

struct Jobim<'a>(&'a DistributionalGraph);

impl FeatureGroup for Jobim<'_> {
    fn name(&self) -> &'static str {
        "jobim"
    }
    fn width(&self) -> usize {
        JOBIM_WIDTH
    }
    fn columns(&self) -> Vec<String> {
        jobim_columns()
    }
    fn extract(&self, t: &Triple, out: &mut Vec<f64>) {
        out.extend_from_slice(
            &self
                .0
                .jobim_feature_block(&t.pivot, &t.comparison, &t.feature)
                .0,
        );
    }
}

struct Patterns<'a> {
    vocab: &'a PatternVocab,
    index: &'a SentenceIndex,
    mode: PatternBlockMode,
    cfg: PatternConfig,
}

impl FeatureGroup for Patterns<'_> {
    fn name(&self) -> &'static str {
        "patterns"
    }
    fn width(&self) -> usize {
        self.mode.width(self.vocab)
    }
    fn columns(&self) -> Vec<String> {
        let n = self.vocab.len();
        match self.mode {
            PatternBlockMode::Stacked => (0..n)
                .map(|i| format!("pat_w1_{i}"))
                .chain((0..n).map(|i| format!("pat_w2_{i}")))
                .collect(),
            _ => (0..n).map(|i| format!("pat_{i}")).collect(),
        }
    }
    fn extract(&self, t: &Triple, out: &mut Vec<f64>) {
        let block = pattern_feature_block(
            self.vocab,
            self.index,
            &t.pivot,
            &t.comparison,
            &t.feature,
            self.mode,
            self.cfg,
        );
        let start = out.len();
        out.resize(start + block.dim, 0.0);
        block.write_dense(&mut out[start..]);
    }
}

pub type GroupFactory = for<'a> fn(&'a Resources) -> Result<Box<dyn FeatureGroup + 'a>>;

fn cooc_factory(r: &Resources) -> Result<Box<dyn FeatureGroup + '_>> {
    Ok(Box::new(Cooc(need(
        &r.cooc,
        "cooc",
        "a co-occurrence table",
    )?)))
}

fn offset_factory(r: &Resources) -> Result<Box<dyn FeatureGroup + '_>> {
    Ok(Box::new(Offset(need(
        &r.embeddings,
        "offset",
        "embeddings",
    )?)))
}

fn concat_factory(r: &Resources) -> Result<Box<dyn FeatureGroup + '_>> {
    Ok(Box::new(Concat(need(
        &r.embeddings,
        "concat",
        "embeddings",
    )?)))
}

fn jobim_factory(r: &Resources) -> Result<Box<dyn FeatureGroup + '_>> {
    Ok(Box::new(Jobim(need(
        &r.graph,
        "jobim",
        "a distributional graph",
    )?)))
}

fn patterns_factory(r: &Resources) -> Result<Box<dyn FeatureGroup + '_>> {
    Ok(Box::new(Patterns {
        vocab: need(&r.patterns, "patterns", "a pattern vocabulary")?,
        index: need(&r.index, "patterns", "a sentence index")?,
        mode: r.pattern_mode,
        cfg: r.pattern_config,
    }))
}

pub struct FeatureRegistry {
    order: Vec<&'static str>,
    factories: HashMap<&'static str, GroupFactory>,
}

impl Default for FeatureRegistry {
    fn default() -> Self {
        let mut r = FeatureRegistry {
            order: Vec::new(),
            factories: HashMap::new(),
        };
        r.register("cooc", cooc_factory);
        r.register("offset", offset_factory);
        r.register("concat", concat_factory);
        r.register("jobim", jobim_factory);
        r.register("patterns", patterns_factory);
        r
    }
}

impl FeatureRegistry {
    /// Registers a group. New names go after existing ones in the
    /// assembly order; re-registering a name replaces its factory in place.
    pub fn register(&mut self, name: &'static str, factory: GroupFactory) {
        if self.factories.insert(name, factory).is_none() {
            self.order.push(name);
        }
    }

    pub fn names(&self) -> &[&'static str] {
        &self.order
    }

    pub fn contains(&self, name: &str) -> bool {
        self.factories.contains_key(name)
    }

    /// Instantiates the masked groups in registry order.
    pub fn pipeline<'a>(
        &self,
        mask: &GroupMask,
        res: &'a Resources,
    ) -> Result<FeaturePipeline<'a>> {
        if mask.is_empty() {
            return Err(Error::Config("no feature groups selected".into()));
        }
        for name in mask.names() {
            if !self.contains(name) {
                return Err(Error::Config(format!(
                    "unknown feature group `{name}` (known: {})",
                    self.order.join(", ")
                )));
            }
        }
        let groups = self
            .order
            .iter()
            .filter(|n| mask.contains(n))
            .map(|n| (self.factories[n])(res))
            .collect::<Result<Vec<_>>>()?;
        Ok(FeaturePipeline { groups })
    }
}

/// A set of group names.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupMask(Vec<String>);

impl GroupMask {
    pub fn new<S: AsRef<str>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut v: Vec<String> = Vec::new();
        for n in names {
            let n = n.as_ref().trim();
            if !n.is_empty() && !v.iter().any(|x| x == n) {
                v.push(n.to_string());
            }
        }
        GroupMask(v)
    }

    /// Comma- or plus-separated names, e.g. `cooc,offset,concat`.
    pub fn parse(s: &str) -> Self {
        GroupMask::new(s.split([',', '+']))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.0.iter().any(|n| n == name)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &GroupMask) -> GroupMask {
        GroupMask::new(self.names().chain(other.names()))
    }
}

/// A named span of an assembled vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpan {
    pub name: &'static str,
    pub start: usize,
    pub width: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub groups: Vec<GroupSpan>,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn group(&self, name: &str) -> Option<&[f64]> {
        self.groups
            .iter()
            .find(|g| g.name == name)
            .map(|g| &self.values[g.start..g.start + g.width])
    }
}

pub struct FeaturePipeline<'a> {
    groups: Vec<Box<dyn FeatureGroup + 'a>>,
}

impl FeaturePipeline<'_> {
    pub fn width(&self) -> usize {
        self.groups.iter().map(|g| g.width()).sum()
    }

    pub fn spans(&self) -> Vec<GroupSpan> {
        let mut start = 0;
        self.groups
            .iter()
            .map(|g| {
                let s = GroupSpan {
                    name: g.name(),
                    start,
                    width: g.width(),
                };
                start += s.width;
                s
            })
            .collect()
    }

    pub fn columns(&self) -> Vec<String> {
        self.groups.iter().flat_map(|g| g.columns()).collect()
    }

    pub fn extract_into(&self, t: &Triple, out: &mut Vec<f64>) {
        for g in &self.groups {
            let before = out.len();
            g.extract(t, out);
            debug_assert_eq!(out.len() - before, g.width(), "group {}", g.name());
        }
    }

    pub fn extract(&self, t: &Triple) -> FeatureVector {
        let mut values = Vec::with_capacity(self.width());
        self.extract_into(t, &mut values);
        FeatureVector {
            groups: self.spans(),
            values,
        }
    }

    /// Feature matrix for many triples, rows in input order.
    pub fn matrix(&self, triples: &[Triple]) -> Matrix {
        let w = self.width();
        let rows: Vec<Vec<f64>> = triples
            .par_iter()
            .map(|t| {
                let mut v = Vec::with_capacity(w);
                self.extract_into(t, &mut v);
                v
            })
            .collect();
        let mut data = Vec::with_capacity(rows.len() * w);
        for r in rows {
            data.extend(r);
        }
        Matrix::new(triples.len(), w, data).expect("rows have pipeline width")
    }
}

pub fn assemble_features(t: &Triple, res: &Resources, mask: &GroupMask) -> Result<FeatureVector> {
    Ok(FeatureRegistry::default().pipeline(mask, res)?.extract(t))
}
