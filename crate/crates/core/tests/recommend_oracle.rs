mod common;

use common::{naive_score, naive_top_n, random_instance, rng, Instance};
use weighted_sims::recommend::{
    item_item_score, select_top, top_n, user_item_score, weighted_score, Metric, Scorer, WeightConfig, DEFAULT_RATIOS,
};

const TOL: f64 = 1e-9;

/// Compares the fast top-N list of `u` against the double-loop oracle.
/// Positions may only differ where the oracle scores tie within `TOL`.
fn check_against_oracle(inst: &Instance, u: usize, w: WeightConfig, n: usize) -> bool {
    let history = inst.matrix.row(u);
    let fast = &top_n(&inst.embeddings, &inst.matrix, &w, n, Some(&[u])).unwrap()[0];
    let naive = naive_top_n(
        &inst.users,
        &inst.items,
        history,
        u,
        w.user_item,
        w.item_item,
        w.metric,
        n,
    );
    assert_eq!(fast.items.len(), naive.len(), "list length for user {u} under {w}");
    let mut exact = true;
    for (k, (&item, &score)) in fast.items.iter().zip(&fast.scores).enumerate() {
        let (naive_item, naive_best) = naive[k];
        assert!((score - naive_best).abs() < TOL, "score at rank {k}: {score} vs {naive_best}");
        if item != naive_item {
            exact = false;
            let own = naive_score(&inst.users, &inst.items, history, u, item, w.user_item, w.item_item, w.metric);
            assert!((own - naive_best).abs() < TOL, "rank {k} holds item {item} outside a tie");
        }
    }
    exact
}

#[test]
fn fast_path_matches_double_loop() {
    let mut r = rng(2024);
    let mut lists = 0;
    let mut exact = 0;
    for _ in 0..200 {
        let inst = random_instance(&mut r, 20, 20, 8);
        for metric in Metric::ALL {
            for (w_r, w_s) in DEFAULT_RATIOS {
                let w = WeightConfig::new(w_r, w_s, metric).unwrap();
                for u in 0..inst.matrix.n_users() {
                    let n = 1 + (u * 7) % (inst.matrix.n_items() + 1);
                    lists += 1;
                    exact += usize::from(check_against_oracle(&inst, u, w, n));
                }
            }
        }
    }
    assert!(lists > 1000);
    assert_eq!(exact, lists, "every list should match without tie reordering");
}

#[test]
fn score_functions_match_definitions() {
    let mut r = rng(7);
    for _ in 0..50 {
        let inst = random_instance(&mut r, 6, 9, 5);
        for metric in Metric::ALL {
            for u in 0..inst.matrix.n_users() {
                let h = inst.matrix.row(u);
                for i in 0..inst.matrix.n_items() {
                    let ui = user_item_score(&inst.embeddings, u, i, metric);
                    let ii = item_item_score(&inst.embeddings, h, i, metric);
                    assert!((ui - naive_score(&inst.users, &inst.items, h, u, i, 1.0, 0.0, metric)).abs() < TOL);
                    assert!((ii - naive_score(&inst.users, &inst.items, h, u, i, 0.0, 1.0, metric)).abs() < TOL);
                    let w = WeightConfig::new(2.0, 3.0, metric).unwrap();
                    let z = weighted_score(ui, ii, &w).unwrap();
                    assert!((z - (2.0 * ui + 3.0 * ii) / 5.0).abs() < 1e-15);
                }
            }
        }
    }
}

#[test]
fn pure_weights_reproduce_base_recommenders() {
    let mut r = rng(99);
    for _ in 0..100 {
        let inst = random_instance(&mut r, 12, 15, 6);
        let n = inst.matrix.n_items();
        for metric in Metric::ALL {
            let scorer = Scorer::new(&inst.embeddings, metric);
            let ui = top_n(&inst.embeddings, &inst.matrix, &WeightConfig::new(1.0, 0.0, metric).unwrap(), n, None).unwrap();
            let ii = top_n(&inst.embeddings, &inst.matrix, &WeightConfig::new(0.0, 1.0, metric).unwrap(), n, None).unwrap();
            for u in 0..inst.matrix.n_users() {
                let h = inst.matrix.row(u);
                let pure_ui = select_top(u, &scorer.user_item_scores(u), h, n);
                let pure_ii = select_top(u, &scorer.item_item_scores(h), h, n);
                assert_eq!(ui[u], pure_ui);
                assert_eq!(ii[u], pure_ii);
            }
        }
    }
}

#[test]
fn weight_scale_invariance() {
    let mut r = rng(5);
    for _ in 0..100 {
        let inst = random_instance(&mut r, 12, 15, 6);
        let n = inst.matrix.n_items();
        for metric in Metric::ALL {
            for (w_r, w_s) in DEFAULT_RATIOS {
                let base = top_n(&inst.embeddings, &inst.matrix, &WeightConfig::new(w_r, w_s, metric).unwrap(), n, None).unwrap();
                for c in [1e-3, 0.5, 2.0, 7.3, 1e6] {
                    let w = WeightConfig::new(c * w_r, c * w_s, metric).unwrap();
                    let scaled = top_n(&inst.embeddings, &inst.matrix, &w, n, None).unwrap();
                    for (a, b) in base.iter().zip(&scaled) {
                        assert_eq!(a.items, b.items, "list changed under scale {c}");
                        for (x, y) in a.scores.iter().zip(&b.scores) {
                            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn power_of_two_scaling_is_bitwise() {
    let mut r = rng(11);
    let inst = random_instance(&mut r, 10, 12, 4);
    let n = inst.matrix.n_items();
    for metric in Metric::ALL {
        let a = top_n(&inst.embeddings, &inst.matrix, &WeightConfig::new(1.0, 3.0, metric).unwrap(), n, None).unwrap();
        let b = top_n(&inst.embeddings, &inst.matrix, &WeightConfig::new(4.0, 12.0, metric).unwrap(), n, None).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn output_independent_of_thread_count() {
    let mut r = rng(3);
    let inst = random_instance(&mut r, 20, 20, 8);
    let w = WeightConfig::new(1.0, 1.0, Metric::Cosine).unwrap();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| top_n(&inst.embeddings, &inst.matrix, &w, 5, None).unwrap())
    };
    assert_eq!(run(1), run(4));
}
