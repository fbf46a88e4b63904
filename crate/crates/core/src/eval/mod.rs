//! Cross-validated evaluation: fold splitting, ranking metrics, grid search
//! and significance testing.

pub mod folds;
pub mod grid;
pub mod metrics;
pub mod stats;

pub use folds::{split_folds, Fold, FoldSplit, UserTest, FOLD_COUNT};
pub use grid::{
    evaluate_embeddings, fold_path, grid_search, recommend_all, BestSet, CellError, EvalReport, GridReport, GridSpec,
    Hyper, LearnerGrid, RecommenderConfig, RecommenderKind, TuningMode, TUNING_CUTOFF,
};
pub use metrics::{hit_rate, metric_curve, ndcg, HitCounting, MetricCurve, MetricOptions};
pub use stats::{friedman_test, nemenyi_cd, nemenyi_q, rank_descending, StatTestResult};
