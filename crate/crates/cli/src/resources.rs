//! Loads only the resources the selected feature groups need.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::Args;
use log::info;

use discrim::corpus::{
    build_vocab, count_cooccurrences, index_sentences, read_corpus, CoocTable, Sentence,
};
use discrim::embeddings::EmbeddingTable;
use discrim::graph::{build_graph, DistributionalGraph, DEFAULT_P};
use discrim::harness::{Dataset, GroupMask, Resources};
use discrim::patterns::{
    build_pattern_vocab, PatternBlockMode, PatternConfig, PatternVocab, DEFAULT_CAP,
    DEFAULT_MAX_GAP, DEFAULT_THRESHOLD,
};

use crate::meta::RunMeta;

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    /// One sentence per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Corpus lines are `token/TAG` pairs.
    #[arg(long)]
    pub tagged: bool,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
}

impl CorpusArgs {
    pub fn load(&self, meta: &mut RunMeta) -> Result<Vec<Sentence>> {
        meta.corpus(&self.corpus)?;
        meta.window = Some(self.window);
        meta.threshold("min_count", self.min_count);
        meta.setting("tagged", self.tagged);
        info!("reading {}", self.corpus.display());
        Ok(read_corpus(&self.corpus, self.tagged)?)
    }

    pub fn counts(&self, corpus: &[Sentence]) -> Result<CoocTable> {
        let vocab = build_vocab(corpus, self.min_count)?;
        info!("{} types, {} tokens", vocab.len(), vocab.total_tokens());
        Ok(count_cooccurrences(corpus, &vocab, self.window)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct ResourceArgs {
    /// Corpus for counts, graph and pattern lookup when no prebuilt file is given.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    #[arg(long)]
    pub tagged: bool,
    #[arg(long, default_value_t = 2)]
    pub window: usize,
    #[arg(long, default_value_t = 1)]
    pub min_count: u64,
    /// Prebuilt co-occurrence counts (`build-counts`).
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// Word vectors, text format, optionally gzipped.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Prebuilt distributional graph (`build-graph`).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Contexts kept per word when the graph is built here.
    #[arg(short = 'p', long = "graph-p", default_value_t = DEFAULT_P)]
    pub p: usize,
    /// Prebuilt pattern vocabulary (`build-pattern-vocab`).
    #[arg(long)]
    pub patterns: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_GAP)]
    pub max_gap: usize,
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// diff, w1 or stacked.
    #[arg(long, default_value = "diff")]
    pub pattern_block: PatternBlockMode,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

impl ResourceArgs {
    fn pattern_config(&self) -> PatternConfig {
        PatternConfig {
            cap: self.cap,
            max_gap: self.max_gap,
        }
    }

    /// `train` is used to build a pattern vocabulary when none is given.
    pub fn load(
        &self,
        mask: &GroupMask,
        train: Option<&Dataset>,
        meta: &mut RunMeta,
    ) -> Result<Resources> {
        let mut res = Resources {
            pattern_mode: self.pattern_block,
            pattern_config: self.pattern_config(),
            ..Resources::default()
        };
        let needs_corpus = (mask.contains("cooc") && self.counts.is_none())
            || (mask.contains("jobim") && self.graph.is_none())
            || mask.contains("patterns");
        let corpus = match (&self.corpus, needs_corpus) {
            (Some(path), true) => {
                meta.corpus(path)?;
                meta.window = Some(self.window);
                meta.threshold("min_count", self.min_count);
                Some(read_corpus(path, self.tagged)?)
            }
            (None, true) => bail!("the selected groups need --corpus"),
            _ => None,
        };
        let counts = |corpus: &[Sentence]| -> Result<CoocTable> {
            let vocab = build_vocab(corpus, self.min_count)?;
            Ok(count_cooccurrences(corpus, &vocab, self.window)?)
        };

        if mask.contains("cooc") {
            let table = match &self.counts {
                Some(path) => {
                    meta.input(path)?;
                    meta.inherit(path);
                    CoocTable::read_tsv(open(path)?)?
                }
                None => counts(corpus.as_deref().expect("corpus loaded"))?,
            };
            res.cooc = Some(Arc::new(table));
        }
        if mask.contains("offset") || mask.contains("concat") {
            let Some(path) = &self.embeddings else {
                bail!("the offset and concat groups need --embeddings");
            };
            meta.input(path)?;
            res.embeddings = Some(Arc::new(EmbeddingTable::load(path)?));
        }
        if mask.contains("jobim") {
            let graph = match &self.graph {
                Some(path) => {
                    meta.input(path)?;
                    meta.inherit(path);
                    DistributionalGraph::read_jsonl(open(path)?)?
                }
                None => {
                    meta.threshold("p", self.p);
                    build_graph(&counts(corpus.as_deref().expect("corpus loaded"))?, self.p)?
                }
            };
            res.graph = Some(Arc::new(graph));
        }
        if mask.contains("patterns") {
            let index = index_sentences(corpus.expect("corpus loaded"));
            let vocab = match (&self.patterns, train) {
                (Some(path), _) => {
                    meta.input(path)?;
                    PatternVocab::read_tsv(open(path)?, self.threshold)?
                }
                (None, Some(train)) => build_pattern_vocab(
                    &index,
                    &train.word_feature_pairs(),
                    self.threshold,
                    self.pattern_config(),
                ),
                (None, None) => bail!("the patterns group needs --patterns"),
            };
            meta.threshold("pattern_threshold", self.threshold);
            meta.threshold("max_gap", self.max_gap);
            meta.threshold("cap", self.cap);
            meta.setting("pattern_block", self.pattern_block.to_string());
            info!("{} patterns", vocab.len());
            res.index = Some(Arc::new(index));
            res.patterns = Some(Arc::new(vocab));
        }
        Ok(res)
    }
}
