//! Parse a raw explicit-rating file, binarize it against the intermediary
//! rating and write the canonical interactions file.
//!
//! cargo run --example prepare_dataset

use std::fs;

use weighted_sims::cli::{cmd_prepare, CANONICAL_FILE};
use weighted_sims::ingest::{intermediary_rating, read_interactions, ColumnMapping, DatasetSpec, FeedbackKind};

const RAW: &str = "\
user,movie,stars
alice,matrix,5
alice,heat,2
bob,matrix,4
bob,alien,5
bob,heat,3
carol,alien,4
carol,heat,5
carol,heat,5
dave,matrix,1
dave,alien,not-a-number
";

pub fn run_example() -> weighted_sims::Result<()> {
    let dir = tempfile::tempdir().expect("temp dir");
    let raw = dir.path().join("ratings.csv");
    fs::write(&raw, RAW).expect("write raw file");

    let spec = DatasetSpec {
        name: "toy".into(),
        path: raw,
        columns: ColumnMapping::new("user", "movie").with_rating("stars"),
        delimiter: ",".into(),
        has_header: true,
        feedback: FeedbackKind::Explicit,
        selected_level: None,
        inclusive_threshold: false,
    };
    println!("intermediary rating of 1..=5: {}", intermediary_rating(&[1.0, 5.0])?);

    let out = dir.path().join("prepared");
    let stats = cmd_prepare(&spec, &out)?;
    assert_eq!(stats.interactions, 5);

    let canonical = out.join(CANONICAL_FILE);
    print!("{}", fs::read_to_string(&canonical).expect("read canonical file"));
    let m = read_interactions(&canonical)?;
    println!("reloaded {} users x {} items", m.n_users(), m.n_items());
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
