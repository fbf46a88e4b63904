//! Five-fold evaluation of fixed ALS hyperparameters: HR@N and NDCG@N for the
//! user-item, item-item and weighted recommenders.
//!
//! cargo run --release --example evaluate_folds

use weighted_sims::embed::{train_als, AlsConfig};
use weighted_sims::eval::{evaluate_embeddings, split_folds, MetricOptions, RecommenderConfig};
use weighted_sims::recommend::{Metric, WeightConfig};
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(150, 120, 2500).with_seed(5))?;
    let split = split_folds(&m, 42)?;
    for (k, f) in split.folds.iter().enumerate() {
        println!(
            "fold {k}: train {} test {} cold-start dropped {}",
            f.train.interaction_count(),
            f.test.len(),
            f.cold_start_dropped
        );
    }

    let cfg = AlsConfig::new(10, 0.1, 16).with_seed(0);
    let embeddings = split
        .folds
        .iter()
        .map(|f| train_als(&f.train, &cfg))
        .collect::<weighted_sims::Result<Vec<_>>>()?;
    let configs = [
        RecommenderConfig::user_item(),
        RecommenderConfig::item_item(Metric::Cosine),
        RecommenderConfig::weighted(WeightConfig::new(1.0, 1.0, Metric::Cosine)?),
    ];
    let reports = evaluate_embeddings(
        &split,
        &embeddings,
        &configs,
        20,
        MetricOptions::default(),
        "als",
        &cfg.describe(),
    )?;
    for r in &reports {
        println!(
            "{:<9} {:<14} HR@10 {:.4}  NDCG@10 {:.4}  NDCG@20 {:.4}",
            r.recommender.kind.label(),
            r.recommender.weights.to_string(),
            r.mean.hr_at(10),
            r.mean.ndcg_at(10),
            r.mean.ndcg_at(20)
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
