//! Cross-validated grid search in both tuning modes. Reuse tunes the
//! embeddings for the user-item recommender only; fine-tune searches the
//! full grid for every recommender, so it can only match or beat reuse.
//!
//! cargo run --release --example grid_search

use weighted_sims::embed::AlsSolver;
use weighted_sims::eval::{grid_search, split_folds, GridSpec, LearnerGrid, RecommenderKind, TuningMode};
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(120, 100, 2000).with_seed(6))?;
    let split = split_folds(&m, 0)?;
    let learner = LearnerGrid::Als {
        epochs: vec![3, 6],
        regularization: vec![0.01, 1.0],
        dim: vec![8],
        confidence_scale: 40.0,
        solver: AlsSolver::Cholesky,
        seed: 0,
    };
    let report = grid_search(&split, &GridSpec::new(learner, TuningMode::FineTune), None)?;

    for kind in RecommenderKind::ALL {
        let reuse = report.reuse.get(kind);
        let tuned = report.best().get(kind);
        println!(
            "{:<9} reuse {:.4} ({}; {})  fine-tune {:.4} ({}; {})",
            kind.label(),
            reuse.tuning_score(),
            reuse.hyper,
            reuse.recommender.weights,
            tuned.tuning_score(),
            tuned.hyper,
            tuned.recommender.weights
        );
        assert!(tuned.tuning_score() >= reuse.tuning_score());
    }
    if let Some(imp) = &report.improvement {
        for (kind, rel) in imp {
            println!("{:<9} fine-tune gain {:+.1}%", kind.label(), rel * 100.0);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
