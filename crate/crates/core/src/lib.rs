//! Discriminative attribute detection.
//!
//! Given a triple `(pivot, comparison, attribute)`, decide whether the
//! attribute describes the pivot but not the comparison. Five feature groups
//! feed a gradient-boosted tree classifier:
//!
//! * `cooc`: co-occurrence counts, PPMI and PLMI ([`association`])
//! * `offset`: embedding offset cosines ([`embeddings`])
//! * `concat`: the three raw embedding vectors ([`embeddings`])
//! * `jobim`: rank/score probes into a distributional graph ([`graph`])
//! * `patterns`: connective pattern frequencies ([`patterns`])
//!
//! Groups are registered by name in [`harness::FeatureRegistry`] and picked
//! at run time with a [`harness::GroupMask`].

pub mod association;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod gbt;
pub mod graph;
pub mod harness;
pub mod patterns;

pub use error::{Error, Result};
