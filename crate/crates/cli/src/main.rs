//! `discrim` command-line tool.

mod meta;
mod resources;
mod table;

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use discrim::corpus::index_sentences;
use discrim::gbt::{train, GbtModel, GbtParams};
use discrim::graph::{build_graph, DEFAULT_P};
use discrim::harness::{
    ablation_table, build_new_validation, cross_validate, dataset_stats, evaluate, load_triples,
    train_test_split, Combo, FeatureRegistry, GroupMask, SyntheticBenchmark, SyntheticConfig,
    DEFAULT_SEED, NEW_VALIDATION_K, TABLE_COMBOS,
};
use discrim::patterns::{
    build_pattern_vocab, PatternConfig, DEFAULT_CAP, DEFAULT_MAX_GAP, DEFAULT_THRESHOLD,
};

use meta::RunMeta;
use resources::{CorpusArgs, ResourceArgs};
use table::{read_features, read_predictions, write_features, write_predictions, Prediction};

#[derive(Parser)]
#[command(
    name = "discrim",
    version,
    about = "Discriminative attribute detection"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Count windowed co-occurrences into a TSV table.
    BuildCounts {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the top-p context graph as JSON lines.
    BuildGraph {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(short = 'p', long, default_value_t = DEFAULT_P)]
        p: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Collect frequent between-patterns over training word pairs.
    BuildPatternVocab {
        #[command(flatten)]
        corpus: CorpusArgs,
        /// Training triples; patterns come from (pivot, feature) and (comparison, feature).
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_GAP)]
        max_gap: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write one feature row per triple.
    ExtractFeatures {
        #[arg(long)]
        data: PathBuf,
        /// Comma-separated group names: cooc, offset, concat, jobim, patterns.
        #[arg(long, default_value = "cooc,offset,concat,jobim,patterns")]
        groups: String,
        #[command(flatten)]
        resources: ResourceArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a boosted tree model on a feature file.
    Train {
        #[arg(long)]
        features: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a feature file with a trained model.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Macro-F1 and per-class scores of a predictions file.
    Evaluate {
        #[arg(long)]
        predictions: PathBuf,
        /// Gold triples; defaults to the label column of the predictions.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Stratified k-fold cross-validation on a feature file.
    Cv {
        #[arg(long)]
        features: PathBuf,
        #[arg(long, default_value_t = 5)]
        folds: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        fold_seed: u64,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train and test one model per group combination.
    Ablate {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Semicolon-separated combinations, numbered (`1,3&6`) or named (`cooc+jobim`).
        #[arg(long, default_value = TABLE_COMBOS)]
        combos: String,
        #[command(flatten)]
        resources: ResourceArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validation set plus k triples sampled from training.
    NewValidation {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        val: PathBuf,
        #[arg(long, default_value_t = NEW_VALIDATION_K)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rows and mean corpus frequency per triple position.
    DatasetStats {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, required = true, num_args = 1..)]
        data: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a small generated benchmark: corpus, vectors, train and test triples.
    MakeSynthetic {
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2000)]
        triples: usize,
        #[arg(long, default_value_t = 0.6)]
        train_fraction: f64,
    },
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 100)]
    rounds: usize,
    #[arg(long, default_value_t = 6)]
    max_depth: usize,
    #[arg(long, default_value_t = 0.3)]
    eta: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value_t = 1.0)]
    min_child_weight: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ParamArgs {
    fn params(&self, meta: &mut RunMeta) -> Result<GbtParams> {
        let p = GbtParams {
            rounds: self.rounds,
            max_depth: self.max_depth,
            eta: self.eta,
            lambda: self.lambda,
            gamma: self.gamma,
            min_child_weight: self.min_child_weight,
            seed: self.seed,
        };
        p.validate()?;
        meta.seeds.insert("gbt", p.seed);
        meta.setting("gbt", p);
        Ok(p)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    run(Cli::parse().command)
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::BuildCounts { corpus, out } => {
            let mut meta = RunMeta::new("build-counts");
            let sentences = corpus.load(&mut meta)?;
            let table = corpus.counts(&sentences)?;
            let mut w = create(&out)?;
            table.write_tsv(&mut w)?;
            w.flush()?;
            info!("{} pairs, total {}", table.num_pairs(), table.total_mass());
            meta.write(&out)
        }
        Command::BuildGraph { corpus, p, out } => {
            let mut meta = RunMeta::new("build-graph");
            let sentences = corpus.load(&mut meta)?;
            meta.threshold("p", p);
            let graph = build_graph(&corpus.counts(&sentences)?, p)?;
            let mut w = create(&out)?;
            graph.write_jsonl(&mut w)?;
            w.flush()?;
            info!("{} targets", graph.len());
            meta.write(&out)
        }
        Command::BuildPatternVocab {
            corpus,
            train,
            threshold,
            max_gap,
            cap,
            out,
        } => {
            let mut meta = RunMeta::new("build-pattern-vocab");
            let sentences = corpus.load(&mut meta)?;
            meta.input(&train)?;
            let data = load_triples(&train)?;
            meta.threshold("pattern_threshold", threshold);
            meta.threshold("max_gap", max_gap);
            meta.threshold("cap", cap);
            let index = index_sentences(sentences);
            let vocab = build_pattern_vocab(
                &index,
                &data.word_feature_pairs(),
                threshold,
                PatternConfig { cap, max_gap },
            );
            let mut w = create(&out)?;
            vocab.write_tsv(&mut w)?;
            w.flush()?;
            info!("{} patterns above {threshold}", vocab.len());
            meta.write(&out)
        }
        Command::ExtractFeatures {
            data,
            groups,
            resources,
            out,
        } => {
            let mut meta = RunMeta::new("extract-features");
            meta.input(&data)?;
            let dataset = load_triples(&data)?;
            let mask = GroupMask::parse(&groups);
            meta.setting("groups", mask.names().collect::<Vec<_>>());
            let res = resources.load(&mask, None, &mut meta)?;
            let pipeline = FeatureRegistry::default().pipeline(&mask, &res)?;
            write_features(&out, &pipeline, &dataset.triples)?;
            meta.setting("width", pipeline.width());
            let widths: BTreeMap<&str, usize> =
                pipeline.spans().iter().map(|s| (s.name, s.width)).collect();
            meta.setting("group_widths", widths);
            if res.embeddings.is_some() {
                meta.setting("oov_vectors", "zero");
            }
            info!("{} rows × {} features", dataset.len(), pipeline.width());
            meta.write(&out)
        }
        Command::Train {
            features,
            params,
            out,
        } => {
            let mut meta = RunMeta::new("train");
            meta.input(&features)?;
            meta.inherit(&features);
            let p = params.params(&mut meta)?;
            let table = read_features(&features)?;
            let model = train(&table.x, &table.labels()?, &p)?;
            fs::write(&out, model.to_json())
                .with_context(|| format!("writing {}", out.display()))?;
            meta.setting("columns", &table.columns);
            info!(
                "{} trees over {} features",
                model.trees.len(),
                model.num_features
            );
            meta.write(&out)
        }
        Command::Predict {
            model,
            features,
            out,
        } => {
            let mut meta = RunMeta::new("predict");
            meta.input(&model)?;
            meta.input(&features)?;
            meta.inherit(&features);
            let bytes = fs::read(&model).with_context(|| format!("reading {}", model.display()))?;
            let model = GbtModel::from_json(&bytes)?;
            let table = read_features(&features)?;
            if table.x.cols() != model.num_features {
                bail!(
                    "model expects {} features, {} has {}",
                    model.num_features,
                    features.display(),
                    table.x.cols()
                );
            }
            let probs = model.predict_probs(&table.x)?;
            let rows: Vec<Prediction> = table
                .triples
                .into_iter()
                .zip(probs)
                .map(|(triple, prob)| Prediction {
                    triple,
                    prob,
                    pred: (prob >= 0.5) as u8,
                })
                .collect();
            write_predictions(&out, &rows)?;
            meta.write(&out)
        }
        Command::Evaluate {
            predictions,
            gold,
            out,
        } => {
            let mut meta = RunMeta::new("evaluate");
            meta.input(&predictions)?;
            let (labels, pred) = read_predictions(&predictions)?;
            let gold_labels = match &gold {
                Some(path) => {
                    meta.input(path)?;
                    load_triples(path)?.labels()?
                }
                None => labels
                    .into_iter()
                    .enumerate()
                    .map(|(i, l)| l.with_context(|| format!("row {} has no gold label", i + 1)))
                    .collect::<Result<_>>()?,
            };
            let m = evaluate(&pred, &gold_labels)?;
            println!(
                "macro-F1 {:.4}  positive F1 {:.4}  negative F1 {:.4}  accuracy {:.4}",
                m.macro_f1, m.positive.f1, m.negative.f1, m.accuracy
            );
            write_json(&out, &m)?;
            meta.write(&out)
        }
        Command::Cv {
            features,
            folds,
            fold_seed,
            params,
            out,
        } => {
            let mut meta = RunMeta::new("cv");
            meta.input(&features)?;
            meta.inherit(&features);
            let p = params.params(&mut meta)?;
            meta.seeds.insert("folds", fold_seed);
            meta.setting("folds", folds);
            let table = read_features(&features)?;
            let report = cross_validate(&table.x, &table.labels()?, &p, folds, fold_seed)?;
            println!(
                "{folds}-fold macro-F1 {:.4}  positive F1 {:.4}",
                report.mean_macro_f1, report.mean_positive_f1
            );
            write_json(&out, &report)?;
            meta.write(&out)
        }
        Command::Ablate {
            train,
            test,
            combos,
            resources,
            params,
            out,
        } => {
            let mut meta = RunMeta::new("ablate");
            meta.input(&train)?;
            meta.input(&test)?;
            let (train_set, test_set) = (load_triples(&train)?, load_triples(&test)?);
            let combos = Combo::parse_list(&combos)?;
            let mask = combos
                .iter()
                .fold(GroupMask::default(), |m, c| m.union(&c.mask));
            let p = params.params(&mut meta)?;
            let res = resources.load(&mask, Some(&train_set), &mut meta)?;
            if res.embeddings.is_some() {
                meta.setting("oov_vectors", "zero");
            }
            let report = ablation_table(&train_set, &test_set, &combos, &res, &p)?;
            print!("{}", report.to_text());
            fs::write(&out, report.to_csv())
                .with_context(|| format!("writing {}", out.display()))?;
            meta.write(&out)
        }
        Command::NewValidation {
            train,
            val,
            k,
            seed,
            out,
        } => {
            let mut meta = RunMeta::new("new-validation");
            meta.input(&train)?;
            meta.input(&val)?;
            meta.seeds.insert("sample", seed);
            meta.setting("k", k);
            let merged =
                build_new_validation(&load_triples(&train)?, &load_triples(&val)?, k, seed)?;
            fs::write(&out, merged.to_csv())
                .with_context(|| format!("writing {}", out.display()))?;
            info!("{} rows", merged.len());
            meta.write(&out)
        }
        Command::DatasetStats { corpus, data, out } => {
            let mut meta = RunMeta::new("dataset-stats");
            let sentences = corpus.load(&mut meta)?;
            let vocab = discrim::corpus::build_vocab(&sentences, corpus.min_count)?;
            let mut w = create(&out)?;
            writeln!(
                w,
                "dataset\trows\tmean_pivot\tmean_comparison\tmean_feature"
            )?;
            for path in &data {
                meta.input(path)?;
                let s = dataset_stats(&load_triples(path)?, &vocab);
                let line = format!(
                    "{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                    s.name, s.rows, s.mean_pivot, s.mean_comparison, s.mean_feature
                );
                println!("{line}");
                writeln!(w, "{line}")?;
            }
            w.flush()?;
            meta.write(&out)
        }
        Command::MakeSynthetic {
            out_dir,
            seed,
            triples,
            train_fraction,
        } => {
            fs::create_dir_all(&out_dir)
                .with_context(|| format!("creating {}", out_dir.display()))?;
            let cfg = SyntheticConfig {
                seed,
                triples,
                ..SyntheticConfig::default()
            };
            let bench = SyntheticBenchmark::generate(&cfg);
            let (tr, te) = train_test_split(bench.dataset.len(), train_fraction, seed);
            let files = [
                ("corpus.txt", bench.corpus_text()),
                ("vectors.txt", bench.embeddings_text()),
                ("train.csv", bench.dataset.subset(&tr).to_csv()),
                ("test.csv", bench.dataset.subset(&te).to_csv()),
            ];
            for (name, text) in files {
                let path = out_dir.join(name);
                fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                let mut meta = RunMeta::new("make-synthetic");
                meta.seeds.insert("synthetic", seed);
                meta.setting("triples", triples);
                meta.setting("train_fraction", train_fraction);
                meta.write(&path)?;
            }
            info!(
                "wrote {} triples to {}",
                bench.dataset.len(),
                out_dir.display()
            );
            Ok(())
        }
    }
}
