//! Datasets, feature assembly, evaluation and the ablation protocol.

pub mod ablation;
pub mod cv;
pub mod dataset;
pub mod features;
pub mod metrics;
pub mod synthetic;

pub use ablation::{ablation_table, AblationReport, AblationRow, Combo, TABLE_COMBOS};
pub use cv::{cross_validate, stratified_folds, train_test_split, CvReport};
pub use dataset::{
    build_new_validation, dataset_stats, load_triples, parse_triples, Dataset, DatasetStats,
    Triple, DEFAULT_SEED, NEW_VALIDATION_K,
};
pub use features::{
    assemble_features, FeatureGroup, FeaturePipeline, FeatureRegistry, FeatureVector, GroupMask,
    GroupSpan, Resources,
};
pub use metrics::{evaluate, ClassMetrics, Metrics};
pub use synthetic::{SyntheticBenchmark, SyntheticConfig};
