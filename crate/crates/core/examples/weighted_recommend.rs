//! Blend user-item and item-item similarity over the same ALS embeddings
//! and print top-5 lists for a few users under several weightings.
//!
//! cargo run --release --example weighted_recommend

use std::io;

use weighted_sims::embed::{train_als, AlsConfig};
use weighted_sims::recommend::{top_n, write_recommendations, Metric, WeightConfig, DEFAULT_RATIOS};
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(100, 80, 1500).with_seed(4))?;
    let e = train_als(&m, &AlsConfig::new(10, 0.1, 16).with_seed(0))?;
    let users = [0, 1, 2];

    for metric in Metric::ALL {
        for (r, s) in DEFAULT_RATIOS {
            let w = WeightConfig::new(r, s, metric)?;
            println!("{w}");
            let lists = top_n(&e, &m, &w, 5, Some(&users))?;
            write_recommendations(&lists, m.user_map(), m.item_map(), io::stdout().lock()).expect("write to stdout");
        }
    }

    // only the ratio matters, not the scale
    let a = top_n(&e, &m, &WeightConfig::new(1.0, 3.0, Metric::Cosine)?, 5, Some(&users))?;
    let b = top_n(&e, &m, &WeightConfig::new(0.25, 0.75, Metric::Cosine)?, 5, Some(&users))?;
    assert!(a.iter().zip(&b).all(|(x, y)| x.items == y.items));
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
