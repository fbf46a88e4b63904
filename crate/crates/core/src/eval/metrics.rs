//! Hit rate and NDCG over top-N lists.
//!
//! Both are micro-averaged: NDCG is the ratio of DCG summed over users to
//! IDCG summed over users, and hit rate divides by the number of users that
//! have at least one test item.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::folds::UserTest;
use crate::error::{Error, Result};
use crate::recommend::RecommendationList;

/// What counts as a hit in the hit-rate numerator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitCounting {
    /// Users with at least one test item in their top-N.
    #[default]
    Users,
    /// Test items found in top-N lists, summed over users.
    Items,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetricOptions {
    /// Truncate the ideal ranking to the first `N` positions.
    pub cap_idcg_at_n: bool,
    pub hit_counting: HitCounting,
}

impl Default for MetricOptions {
    fn default() -> Self {
        Self {
            cap_idcg_at_n: true,
            hit_counting: HitCounting::Users,
        }
    }
}

#[inline]
fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

fn lists_by_user(recs: &[RecommendationList]) -> HashMap<usize, &[usize]> {
    recs.iter().map(|r| (r.user, r.items.as_slice())).collect()
}

fn evaluable(test: &[UserTest]) -> Result<impl Iterator<Item = &UserTest>> {
    if !test.iter().any(|t| !t.items.is_empty()) {
        return Err(Error::NoEvaluableUsers);
    }
    Ok(test.iter().filter(|t| !t.items.is_empty()))
}

pub fn hit_rate(recs: &[RecommendationList], test: &[UserTest], n: usize, counting: HitCounting) -> Result<f64> {
    let lists = lists_by_user(recs);
    let mut users = 0usize;
    let mut hits = 0usize;
    for t in evaluable(test)? {
        users += 1;
        let list = lists.get(&t.user).copied().unwrap_or_default();
        let found = list
            .iter()
            .take(n)
            .filter(|i| t.items.binary_search(i).is_ok())
            .count();
        hits += match counting {
            HitCounting::Users => usize::from(found > 0),
            HitCounting::Items => found,
        };
    }
    Ok(hits as f64 / users as f64)
}

pub fn ndcg(recs: &[RecommendationList], test: &[UserTest], n: usize, cap_idcg_at_n: bool) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidConfig("NDCG cutoff must be at least 1".into()));
    }
    let lists = lists_by_user(recs);
    let mut dcg = 0.0;
    let mut idcg = 0.0;
    for t in evaluable(test)? {
        let list = lists.get(&t.user).copied().unwrap_or_default();
        for (rank, item) in list.iter().take(n).enumerate() {
            if t.items.binary_search(item).is_ok() {
                dcg += discount(rank + 1);
            }
        }
        let ideal = if cap_idcg_at_n { t.items.len().min(n) } else { t.items.len() };
        idcg += (1..=ideal).map(discount).sum::<f64>();
    }
    Ok(dcg / idcg)
}

/// HR@N and NDCG@N for every `N` in `1..=n_max`, index `N - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricCurve {
    pub hr: Vec<f64>,
    pub ndcg: Vec<f64>,
}

impl MetricCurve {
    pub fn n_max(&self) -> usize {
        self.hr.len()
    }

    pub fn hr_at(&self, n: usize) -> f64 {
        self.hr[n - 1]
    }

    pub fn ndcg_at(&self, n: usize) -> f64 {
        self.ndcg[n - 1]
    }

    /// Element-wise mean of several curves.
    pub fn mean(curves: &[MetricCurve]) -> MetricCurve {
        let k = curves.len() as f64;
        let n = curves.first().map_or(0, MetricCurve::n_max);
        let avg = |f: fn(&MetricCurve) -> &Vec<f64>| {
            (0..n).map(|j| curves.iter().map(|c| f(c)[j]).sum::<f64>() / k).collect()
        };
        MetricCurve {
            hr: avg(|c| &c.hr),
            ndcg: avg(|c| &c.ndcg),
        }
    }
}

/// Single pass computing [`hit_rate`] and [`ndcg`] for all cutoffs up to `n_max`.
pub fn metric_curve(
    recs: &[RecommendationList],
    test: &[UserTest],
    n_max: usize,
    opts: MetricOptions,
) -> Result<MetricCurve> {
    if n_max == 0 {
        return Err(Error::InvalidConfig("n_max must be at least 1".into()));
    }
    let lists = lists_by_user(recs);
    let mut hits = vec![0usize; n_max];
    let mut dcg = vec![0.0; n_max];
    let mut idcg = vec![0.0; n_max];
    let mut users = 0usize;
    let ideal_prefix: Vec<f64> = (1..=n_max)
        .scan(0.0, |acc, r| {
            *acc += discount(r);
            Some(*acc)
        })
        .collect();
    for t in evaluable(test)? {
        users += 1;
        let list = lists.get(&t.user).copied().unwrap_or_default();
        // per-rank gains, accumulated into every cutoff at or beyond the rank
        let mut found = 0usize;
        let mut gain = 0.0;
        for n in 0..n_max {
            if let Some(item) = list.get(n) {
                if t.items.binary_search(item).is_ok() {
                    found += 1;
                    gain += discount(n + 1);
                }
            }
            hits[n] += match opts.hit_counting {
                HitCounting::Users => usize::from(found > 0),
                HitCounting::Items => found,
            };
            dcg[n] += gain;
            idcg[n] += if opts.cap_idcg_at_n {
                ideal_prefix[t.items.len().min(n + 1) - 1]
            } else {
                (1..=t.items.len()).map(discount).sum::<f64>()
            };
        }
    }
    Ok(MetricCurve {
        hr: hits.iter().map(|&h| h as f64 / users as f64).collect(),
        ndcg: dcg.iter().zip(&idcg).map(|(d, i)| d / i).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(user: usize, items: &[usize]) -> RecommendationList {
        RecommendationList {
            user,
            items: items.to_vec(),
            scores: vec![0.0; items.len()],
        }
    }

    fn test_of(user: usize, items: &[usize]) -> UserTest {
        UserTest {
            user,
            items: items.to_vec(),
        }
    }

    #[test]
    fn hit_rate_examples() {
        let recs: Vec<_> = (0..10).map(|u| rec(u, &[u, 100])).collect();
        let test: Vec<_> = (0..10)
            .map(|u| test_of(u, if u < 3 { &[100] } else { &[200] }))
            .collect();
        assert!((hit_rate(&recs, &test, 2, HitCounting::Users).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(hit_rate(&recs, &test, 1, HitCounting::Users).unwrap(), 0.0);
        let test: Vec<_> = (0..10).map(|u| test_of(u, &[u])).collect();
        assert_eq!(hit_rate(&recs, &test, 1, HitCounting::Users).unwrap(), 1.0);
        assert!(matches!(hit_rate(&recs, &[], 1, HitCounting::Users), Err(Error::NoEvaluableUsers)));
    }

    #[test]
    fn item_counting_can_exceed_one() {
        let recs = vec![rec(0, &[1, 2])];
        let test = vec![test_of(0, &[1, 2])];
        assert_eq!(hit_rate(&recs, &test, 2, HitCounting::Items).unwrap(), 2.0);
        assert_eq!(hit_rate(&recs, &test, 2, HitCounting::Users).unwrap(), 1.0);
    }

    #[test]
    fn ndcg_examples() {
        let test = vec![test_of(0, &[7])];
        assert_eq!(ndcg(&[rec(0, &[7, 1, 2])], &test, 10, true).unwrap(), 1.0);
        assert_eq!(ndcg(&[rec(0, &[1, 2, 7])], &test, 10, true).unwrap(), 0.5);
        assert_eq!(ndcg(&[rec(0, &[1, 2, 7])], &test, 2, true).unwrap(), 0.0);
    }

    #[test]
    fn capped_ndcg_can_drop_with_n() {
        // two test items, one hit at rank 1: the ideal grows with N, DCG does not
        let recs = vec![rec(0, &[1, 5, 6])];
        let test = vec![test_of(0, &[1, 2])];
        let at1 = ndcg(&recs, &test, 1, true).unwrap();
        let at2 = ndcg(&recs, &test, 2, true).unwrap();
        assert_eq!(at1, 1.0);
        assert!(at2 < at1);
        let lit1 = ndcg(&recs, &test, 1, false).unwrap();
        let lit2 = ndcg(&recs, &test, 2, false).unwrap();
        assert_eq!(lit1, lit2);
    }

    #[test]
    fn curve_matches_pointwise() {
        let recs = vec![rec(0, &[3, 1, 4, 9, 5]), rec(1, &[9, 2, 6]), rec(2, &[])];
        let test = vec![test_of(0, &[1, 5]), test_of(1, &[6, 7, 8]), test_of(2, &[0]), test_of(3, &[])];
        for cap in [true, false] {
            for counting in [HitCounting::Users, HitCounting::Items] {
                let opts = MetricOptions {
                    cap_idcg_at_n: cap,
                    hit_counting: counting,
                };
                let c = metric_curve(&recs, &test, 6, opts).unwrap();
                for n in 1..=6 {
                    assert!((c.hr_at(n) - hit_rate(&recs, &test, n, counting).unwrap()).abs() < 1e-15);
                    assert!((c.ndcg_at(n) - ndcg(&recs, &test, n, cap).unwrap()).abs() < 1e-15);
                }
            }
        }
    }
}
