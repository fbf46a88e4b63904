//! Friedman rank test over an n-datasets × k-models score table, with the
//! Nemenyi critical difference for post-hoc pairwise comparison.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Studentized range quantiles divided by sqrt(2), infinite degrees of
/// freedom, for k = 2..=20 models.
const NEMENYI_Q_05: [f64; 19] = [
    1.959964, 2.343701, 2.569032, 2.727774, 2.849705, 2.948320, 3.030878, 3.101730, 3.163684, 3.218654,
    3.268004, 3.312739, 3.353618, 3.391230, 3.426041, 3.458425, 3.488685, 3.517073, 3.543799,
];
const NEMENYI_Q_10: [f64; 19] = [
    1.644854, 2.052293, 2.291341, 2.459516, 2.588521, 2.692732, 2.779884, 2.854606, 2.919889, 2.977768,
    3.029694, 3.076733, 3.119693, 3.159199, 3.195743, 3.229723, 3.261461, 3.291224, 3.319233,
];

/// Nemenyi `q_alpha` for `k` models; `None` outside the table.
pub fn nemenyi_q(k: usize, alpha: f64) -> Option<f64> {
    let table = if (alpha - 0.05).abs() < 1e-12 {
        &NEMENYI_Q_05
    } else if (alpha - 0.10).abs() < 1e-12 {
        &NEMENYI_Q_10
    } else {
        return None;
    };
    k.checked_sub(2).and_then(|i| table.get(i)).copied()
}

/// `q_alpha * sqrt(k (k + 1) / (6 n))`.
pub fn nemenyi_cd(k: usize, n: usize, alpha: f64) -> Result<f64> {
    let q = nemenyi_q(k, alpha).ok_or_else(|| {
        Error::StatsInput(format!("no Nemenyi q value for k={k}, alpha={alpha} (k in 2..=20, alpha 0.05 or 0.10)"))
    })?;
    Ok(q * ((k * (k + 1)) as f64 / (6.0 * n as f64)).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatTestResult {
    pub friedman_statistic: f64,
    pub k: usize,
    pub n: usize,
    /// Mean rank per model, 1 = best.
    pub average_ranks: Vec<f64>,
    pub nemenyi_cd: f64,
    pub alpha: f64,
}

impl StatTestResult {
    /// Model pairs whose average ranks differ by more than the critical difference.
    pub fn significant_pairs(&self) -> Vec<(usize, usize)> {
        let r = &self.average_ranks;
        let mut out = Vec::new();
        for a in 0..r.len() {
            for b in a + 1..r.len() {
                if (r[a] - r[b]).abs() > self.nemenyi_cd {
                    out.push((a, b));
                }
            }
        }
        out
    }
}

/// Ranks of one row, highest score = 1, ties share their mean rank.
pub fn rank_descending(row: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..row.len()).collect();
    order.sort_by(|&a, &b| row[b].partial_cmp(&row[a]).expect("scores are finite"));
    let mut ranks = vec![0.0; row.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && row[order[end]] == row[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &m in &order[start..end] {
            ranks[m] = shared;
        }
        start = end;
    }
    ranks
}

/// Friedman statistic `12n / (k(k+1)) * (sum_j R_j^2 - k(k+1)^2 / 4)` over
/// `scores[dataset][model]` plus the Nemenyi critical difference at `alpha`.
pub fn friedman_test(scores: &[Vec<f64>], alpha: f64) -> Result<StatTestResult> {
    let n = scores.len();
    if n < 2 {
        return Err(Error::StatsInput(format!("need at least 2 datasets, got {n}")));
    }
    let k = scores[0].len();
    if k < 2 {
        return Err(Error::StatsInput(format!("need at least 2 models, got {k}")));
    }
    for (d, row) in scores.iter().enumerate() {
        if row.len() != k {
            return Err(Error::StatsInput(format!("row {d} has {} cells, expected {k}", row.len())));
        }
        if let Some(m) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::StatsInput(format!("row {d}, model {m}: missing or non-finite score")));
        }
    }
    let mut average_ranks = vec![0.0; k];
    for row in scores {
        for (acc, r) in average_ranks.iter_mut().zip(rank_descending(row)) {
            *acc += r;
        }
    }
    average_ranks.iter_mut().for_each(|r| *r /= n as f64);
    let kf = k as f64;
    let sum_sq: f64 = average_ranks.iter().map(|r| r * r).sum();
    let friedman_statistic = 12.0 * n as f64 / (kf * (kf + 1.0)) * (sum_sq - kf * (kf + 1.0).powi(2) / 4.0);
    Ok(StatTestResult {
        friedman_statistic,
        k,
        n,
        average_ranks,
        nemenyi_cd: nemenyi_cd(k, n, alpha)?,
        alpha,
    })
}
