//! Train implicit ALS on a synthetic clustered dataset and watch the loss.
//!
//! cargo run --release --example train_als

use weighted_sims::embed::{AlsConfig, AlsSolver, AlsTrainer};
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(200, 150, 3000).with_seed(1))?;
    println!("{} users, {} items, {} interactions", m.n_users(), m.n_items(), m.interaction_count());

    for solver in [AlsSolver::Cholesky, AlsSolver::ConjugateGradient { steps: 3 }] {
        let cfg = AlsConfig {
            solver,
            ..AlsConfig::new(8, 0.1, 16).with_seed(7)
        };
        let mut trainer = AlsTrainer::new(&m, cfg)?;
        let mut losses = vec![trainer.loss()];
        for _ in 0..cfg.epochs {
            trainer.step()?;
            losses.push(trainer.loss());
        }
        println!("{solver:?}");
        for (epoch, loss) in losses.iter().enumerate() {
            println!("  epoch {epoch:>2}  loss {loss:.3}");
        }
        assert!(losses.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-9)));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
