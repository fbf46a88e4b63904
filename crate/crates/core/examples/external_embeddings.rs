//! Export trained embeddings to the text format, re-import them against the
//! dataset's id maps and recommend from the imported copy. Embeddings from
//! any other tool can be plugged in the same way.
//!
//! cargo run --release --example external_embeddings

use std::fs;

use weighted_sims::embed::{export_embeddings, import_embeddings, train_bpr, BprConfig};
use weighted_sims::recommend::{top_n, Metric, WeightConfig};
use weighted_sims::synthetic::{generate, SyntheticSpec};

pub fn run_example() -> weighted_sims::Result<()> {
    let m = generate(&SyntheticSpec::new(60, 50, 800).with_seed(8))?;
    let trained = train_bpr(&m, &BprConfig::new(10, 0.05, 0.01, 8).with_seed(1))?;

    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("bpr.wse");
    export_embeddings(&trained, m.user_map(), m.item_map(), &path)?;
    let text = fs::read_to_string(&path).expect("read embedding file");
    for line in text.lines().take(3) {
        println!("{}", &line[..line.len().min(72)]);
    }

    let imported = import_embeddings(&path, m.user_map(), m.item_map())?;
    println!("imported: {}", imported.source());
    let w = WeightConfig::new(1.0, 1.0, Metric::Cosine)?;
    let a = top_n(&trained, &m, &w, 10, None)?;
    let b = top_n(&imported, &m, &w, 10, None)?;
    assert!(a.iter().zip(&b).all(|(x, y)| x.items == y.items));
    println!("{} identical top-10 lists after the round trip", a.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
