mod common;

use common::{literal_hr, literal_ndcg, rng};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use weighted_sims::eval::{hit_rate, metric_curve, ndcg, HitCounting, MetricOptions, UserTest};
use weighted_sims::recommend::RecommendationList;

type Case = (Vec<(usize, Vec<usize>)>, Vec<(usize, Vec<usize>)>);

/// Random lists over a small item universe; some users have no list, some
/// no test items, lists may be shorter than the cutoff.
fn random_case(r: &mut ChaCha8Rng) -> Case {
    let users = r.gen_range(1..8);
    let items = r.gen_range(2..25);
    let mut recs = Vec::new();
    let mut test = Vec::new();
    for u in 0..users {
        let mut pool: Vec<usize> = (0..items).collect();
        pool.shuffle(r);
        let len = r.gen_range(0..=items.min(20));
        if r.gen_bool(0.9) {
            recs.push((u, pool[..len].to_vec()));
        }
        pool.shuffle(r);
        let t = r.gen_range(0..=items.min(6));
        let mut t_items = pool[..t].to_vec();
        t_items.sort_unstable();
        test.push((u, t_items));
    }
    if test.iter().all(|(_, t)| t.is_empty()) {
        test[0].1 = vec![0];
    }
    (recs, test)
}

fn to_library(case: &Case) -> (Vec<RecommendationList>, Vec<UserTest>) {
    let recs = case
        .0
        .iter()
        .map(|(u, l)| RecommendationList {
            user: *u,
            items: l.clone(),
            scores: vec![0.0; l.len()],
        })
        .collect();
    let test = case
        .1
        .iter()
        .map(|(u, t)| UserTest {
            user: *u,
            items: t.clone(),
        })
        .collect();
    (recs, test)
}

#[test]
fn metrics_match_literal_equations() {
    let mut r = rng(17);
    for _ in 0..100 {
        let case = random_case(&mut r);
        let (recs, test) = to_library(&case);
        for cap in [true, false] {
            let opts = MetricOptions {
                cap_idcg_at_n: cap,
                hit_counting: HitCounting::Users,
            };
            let curve = metric_curve(&recs, &test, 20, opts).unwrap();
            for n in 1..=20 {
                let hr = literal_hr(&case.0, &case.1, n);
                let nd = literal_ndcg(&case.0, &case.1, n, cap);
                assert!((hit_rate(&recs, &test, n, HitCounting::Users).unwrap() - hr).abs() < 1e-12);
                assert!((ndcg(&recs, &test, n, cap).unwrap() - nd).abs() < 1e-12);
                assert!((curve.hr_at(n) - hr).abs() < 1e-12);
                assert!((curve.ndcg_at(n) - nd).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn literal_ndcg_and_hr_monotone_in_n() {
    let mut r = rng(23);
    let opts = MetricOptions {
        cap_idcg_at_n: false,
        hit_counting: HitCounting::Users,
    };
    for _ in 0..100 {
        let (recs, test) = to_library(&random_case(&mut r));
        let c = metric_curve(&recs, &test, 20, opts).unwrap();
        assert!(c.ndcg.windows(2).all(|w| w[1] >= w[0]));
        assert!(c.hr.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn capped_ndcg_bounded() {
    let mut r = rng(29);
    for _ in 0..100 {
        let (recs, test) = to_library(&random_case(&mut r));
        let c = metric_curve(&recs, &test, 20, MetricOptions::default()).unwrap();
        assert!(c.ndcg.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(c.hr.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(c.hr.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn perfect_lists_score_one_when_capped() {
    let test = vec![UserTest { user: 0, items: vec![2, 4, 6] }];
    let recs = vec![RecommendationList {
        user: 0,
        items: vec![4, 2, 6, 1],
        scores: vec![0.0; 4],
    }];
    let c = metric_curve(&recs, &test, 4, MetricOptions::default()).unwrap();
    assert_eq!(c.ndcg, vec![1.0; 4]);
}
