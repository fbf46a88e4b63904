//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's scoring or metric code.

#![allow(dead_code, clippy::too_many_arguments)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weighted_sims::embedding::{DenseMatrix, EmbeddingPair};
use weighted_sims::interactions::InteractionMatrix;
use weighted_sims::recommend::Metric;

pub fn plain_dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for k in 0..a.len() {
        s += a[k] * b[k];
    }
    s
}

pub fn plain_sim(metric: Metric, a: &[f64], b: &[f64]) -> f64 {
    match metric {
        Metric::Dot => plain_dot(a, b),
        Metric::Cosine => {
            let na = plain_dot(a, a).sqrt();
            let nb = plain_dot(b, b).sqrt();
            if na == 0.0 || nb == 0.0 {
                0.0
            } else {
                plain_dot(a, b) / (na * nb)
            }
        }
    }
}

/// Naive blended score: every history item visited pair by pair.
pub fn naive_score(
    users: &[Vec<f64>],
    items: &[Vec<f64>],
    history: &[usize],
    u: usize,
    i: usize,
    w_r: f64,
    w_s: f64,
    metric: Metric,
) -> f64 {
    let r = plain_sim(metric, &users[u], &items[i]);
    let mut s = 0.0;
    if !history.is_empty() {
        for &j in history {
            s += plain_sim(metric, &items[i], &items[j]);
        }
        s /= history.len() as f64;
    }
    (w_r * r + w_s * s) / (w_r + w_s)
}

/// Double loop over users and items, full sort, first `n` kept.
pub fn naive_top_n(
    users: &[Vec<f64>],
    items: &[Vec<f64>],
    history: &[usize],
    u: usize,
    w_r: f64,
    w_s: f64,
    metric: Metric,
    n: usize,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = (0..items.len())
        .filter(|i| !history.contains(i))
        .map(|i| (i, naive_score(users, items, history, u, i, w_r, w_s, metric)))
        .collect();
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    scored.truncate(n);
    scored
}

/// Literal hit rate: users with a non-empty test set that have a test item
/// among their first `n` recommendations.
pub fn literal_hr(recs: &[(usize, Vec<usize>)], test: &[(usize, Vec<usize>)], n: usize) -> f64 {
    let mut users = 0.0;
    let mut hits = 0.0;
    for (u, t) in test {
        if t.is_empty() {
            continue;
        }
        users += 1.0;
        let list = recs.iter().find(|(v, _)| v == u).map(|(_, l)| l.clone()).unwrap_or_default();
        if list.iter().take(n).any(|i| t.contains(i)) {
            hits += 1.0;
        }
    }
    hits / users
}

/// Literal NDCG: DCG and IDCG summed over users, then divided.
pub fn literal_ndcg(recs: &[(usize, Vec<usize>)], test: &[(usize, Vec<usize>)], n: usize, cap: bool) -> f64 {
    let mut dcg = 0.0;
    let mut idcg = 0.0;
    for (u, t) in test {
        if t.is_empty() {
            continue;
        }
        let list = recs.iter().find(|(v, _)| v == u).map(|(_, l)| l.clone()).unwrap_or_default();
        let shown = list.len().min(n);
        for pos in 1..=shown {
            let rel = if t.contains(&list[pos - 1]) { 1.0 } else { 0.0 };
            dcg += rel / ((pos + 1) as f64).log2();
        }
        let ideal = if cap { t.len().min(n) } else { t.len() };
        for pos in 1..=ideal {
            idcg += 1.0 / ((pos + 1) as f64).log2();
        }
    }
    dcg / idcg
}

/// Random small instance: embeddings, interactions and the raw vectors.
pub struct Instance {
    pub users: Vec<Vec<f64>>,
    pub items: Vec<Vec<f64>>,
    pub matrix: InteractionMatrix,
    pub embeddings: EmbeddingPair,
}

pub fn random_instance(rng: &mut ChaCha8Rng, max_users: usize, max_items: usize, max_dim: usize) -> Instance {
    let n_users = rng.gen_range(1..=max_users);
    let n_items = rng.gen_range(1..=max_items);
    let d = rng.gen_range(1..=max_dim);
    let vector = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        // occasional zero vector exercises the cosine zero-norm rule
        if rng.gen_bool(0.05) {
            vec![0.0; d]
        } else {
            (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()
        }
    };
    let users: Vec<Vec<f64>> = (0..n_users).map(|_| vector(rng)).collect();
    let items: Vec<Vec<f64>> = (0..n_items).map(|_| vector(rng)).collect();
    let density: f64 = rng.gen_range(0.0..0.6);
    let mut pairs = Vec::new();
    for u in 0..n_users {
        for i in 0..n_items {
            if rng.gen_bool(density) {
                pairs.push((u, i));
            }
        }
    }
    let ids = |prefix: &str, n: usize| {
        let mut m = weighted_sims::IdMap::new();
        for k in 0..n {
            m.intern(&format!("{prefix}{k}"));
        }
        std::sync::Arc::new(m)
    };
    let matrix = InteractionMatrix::from_indexed(ids("u", n_users), ids("i", n_items), pairs).unwrap();
    let flat = |rows: &[Vec<f64>]| DenseMatrix::from_vec(rows.len(), d, rows.concat());
    let embeddings = EmbeddingPair::new(flat(&users), flat(&items), "random").unwrap();
    Instance {
        users,
        items,
        matrix,
        embeddings,
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two user groups, each consuming exactly its own item block.
pub fn two_blocks(users_per_block: usize, items_per_block: usize) -> InteractionMatrix {
    let mut pairs = Vec::new();
    for b in 0..2 {
        for u in 0..users_per_block {
            for i in 0..items_per_block {
                pairs.push((format!("u{}", b * users_per_block + u), format!("i{}", b * items_per_block + i)));
            }
        }
    }
    InteractionMatrix::from_pairs(&pairs).unwrap()
}
