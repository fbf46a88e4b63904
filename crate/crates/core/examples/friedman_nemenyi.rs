//! Friedman test and Nemenyi critical difference over an NDCG@10 table of
//! nine datasets by nine models.
//!
//! cargo run --example friedman_nemenyi

use weighted_sims::eval::friedman_test;

const MODELS: [&str; 9] = [
    "ALS UI", "ALS II", "ALS W", "BPR UI", "BPR II", "BPR W", "RecVAE UI", "RecVAE II", "RecVAE W",
];

const NDCG_AT_10: [[f64; 9]; 9] = [
    [0.4433, 0.1887, 0.4428, 0.3109, 0.2206, 0.3277, 0.5124, 0.3369, 0.5269],
    [0.0690, 0.0249, 0.0921, 0.1126, 0.1439, 0.1411, 0.2014, 0.1719, 0.2047],
    [0.0444, 0.0166, 0.0438, 0.0381, 0.0370, 0.0436, 0.0533, 0.0278, 0.0522],
    [0.0371, 0.3932, 0.3917, 0.4143, 0.4371, 0.4396, 0.3211, 0.3607, 0.3630],
    [0.2875, 0.1635, 0.4624, 0.4568, 0.4058, 0.4520, 0.5061, 0.3801, 0.5061],
    [0.3625, 0.2902, 0.4240, 0.4571, 0.3791, 0.4669, 0.5592, 0.4341, 0.5534],
    [0.2192, 0.1214, 0.2219, 0.1982, 0.1222, 0.2026, 0.2131, 0.0700, 0.2130],
    [0.3917, 0.2017, 0.3909, 0.2512, 0.1618, 0.2545, 0.3711, 0.2899, 0.3733],
    [0.0945, 0.1003, 0.1017, 0.0999, 0.1071, 0.1078, 0.1281, 0.0649, 0.1274],
];

pub fn run_example() -> weighted_sims::Result<()> {
    let table: Vec<Vec<f64>> = NDCG_AT_10.iter().map(|r| r.to_vec()).collect();
    let result = friedman_test(&table, 0.10)?;
    println!("X2_r = {:.4}", result.friedman_statistic);
    let mut order: Vec<usize> = (0..MODELS.len()).collect();
    order.sort_by(|&a, &b| result.average_ranks[a].total_cmp(&result.average_ranks[b]));
    for m in order {
        println!("  {:<10} {:.3}", MODELS[m], result.average_ranks[m]);
    }
    println!("CD(alpha = 0.10) = {:.3}", result.nemenyi_cd);
    for (a, b) in result.significant_pairs() {
        println!("  {} and {} differ", MODELS[a], MODELS[b]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> weighted_sims::Result<()> {
    run_example()
}
