//! Train BPR on a synthetic dataset and measure how often a held-in positive
//! outscores a random negative.
//!
//! cargo run --release --example train_bpr

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weighted_sims::embed::{train_bpr, BprConfig};
use weighted_sims::embedding::dot;
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(200, 150, 3000).with_seed(2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for epochs in [1, 5, 30] {
        let e = train_bpr(&m, &BprConfig::new(epochs, 0.05, 0.01, 16).with_seed(3))?;
        let (mut wins, mut total) = (0usize, 0usize);
        for (u, i) in m.iter() {
            let j = rng.gen_range(0..m.n_items());
            if m.contains(u, j) {
                continue;
            }
            total += 1;
            wins += usize::from(dot(e.user(u), e.item(i)) > dot(e.user(u), e.item(j)));
        }
        println!("{epochs:>2} epochs: training AUC {:.3}", wins as f64 / total as f64);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
