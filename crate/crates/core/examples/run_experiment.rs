//! The whole experiment pipeline from a TOML configuration, as `wsims run`
//! executes it: split, train per fold, recommend, score, select, report.
//!
//! cargo run --release --example run_experiment

use std::fs;

use weighted_sims::cli::{cmd_run, RunConfig, CANONICAL_FILE, CURVES_DIR, RESULTS_CSV};
use weighted_sims::ingest::write_interactions;
use weighted_sims::synthetic::{generate, SyntheticSpec};

const CONFIG: &str = r#"
seed = 3
mode = "fine_tune"
n_max = 10
metrics = ["cosine"]
weights = [[1.0, 1.0], [3.0, 1.0]]
out = "results"

[dataset]
prepared = "interactions.tsv"

[learner]
kind = "bpr"
epochs = [5, 10]
learning_rate = [0.05]
regularization = [0.01]
dim = [8]
"#;

pub fn run_example() -> weighted_sims::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let m = generate(&SyntheticSpec::new(80, 60, 1200).with_seed(9))?;
    write_interactions(&m, &dir.path().join(CANONICAL_FILE))?;
    let config = dir.path().join("run.toml");
    fs::write(&config, CONFIG).expect("write config");

    let cfg = RunConfig::load(&config)?;
    let results = cmd_run(&cfg)?;
    println!("config hash {}", results.provenance.config_hash);
    print!("{}", fs::read_to_string(cfg.out.join(RESULTS_CSV)).expect("read results.csv"));
    let curves = fs::read_dir(cfg.out.join(CURVES_DIR)).expect("curves dir").count();
    println!("{curves} curve files");
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
