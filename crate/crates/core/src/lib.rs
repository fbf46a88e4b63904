//! Top-N recommendation by a weighted blend of user-item and item-item
//! similarities computed over one shared set of embeddings.
//!
//! The pipeline is:
//!
//! 1. [`ingest`]: parse a raw dataset, binarize ratings, deduplicate.
//! 2. [`embed`]: learn user and item factors with ALS or BPR, or import them.
//! 3. [`recommend`]: score every unseen item and keep the top N.
//! 4. [`eval`]: five-fold cross-validation, HR/NDCG curves, grid search and
//!    the Friedman/Nemenyi test.
//!
//! [`cli`] ties these together behind the `wsims` binary.

pub mod cli;
pub mod embed;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod interactions;
pub mod recommend;
pub mod synthetic;

pub use embedding::{DenseMatrix, EmbeddingPair};
pub use error::{Error, Result};
pub use interactions::{IdMap, InteractionMatrix};
pub use recommend::{top_n, Metric, RecommendationList, WeightConfig};
