//! Weighted user-item / item-item similarity recommender.
//!
//! For a user `u` and a candidate item `i` outside the user's history `I_u`:
//!
//! * `R(u, i) = sim(p_u, q_i)`
//! * `S(u, i) = mean over j in I_u of sim(q_i, q_j)`
//! * `Z(u, i) = (w_R R + w_S S) / (w_R + w_S)`
//!
//! `sim` is either the dot product or cosine similarity. Both are linear in
//! the second argument once rows are normalized, so `S` is computed against
//! the (normalized) centroid of the history rather than pair by pair.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{dot, norm, DenseMatrix, EmbeddingPair};
use crate::error::{Error, Result};
use crate::interactions::{IdMap, InteractionMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Dot,
    Cosine,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Dot, Metric::Cosine];

    pub fn similarity(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Dot => dot(a, b),
            Metric::Cosine => {
                let (na, nb) = (norm(a), norm(b));
                if na == 0.0 || nb == 0.0 {
                    0.0
                } else {
                    dot(a, b) / (na * nb)
                }
            }
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Dot => "dot",
            Metric::Cosine => "cosine",
        })
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(Metric::Dot),
            "cosine" => Ok(Metric::Cosine),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

/// `(w_R : w_S)` ratios explored by default.
pub const DEFAULT_RATIOS: [(f64, f64); 5] = [(1.0, 4.0), (2.0, 3.0), (1.0, 1.0), (3.0, 2.0), (4.0, 1.0)];

/// Ensemble weights plus the similarity used by both components.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub user_item: f64,
    pub item_item: f64,
    pub metric: Metric,
}

impl WeightConfig {
    pub fn new(user_item: f64, item_item: f64, metric: Metric) -> Result<Self> {
        let w = Self {
            user_item,
            item_item,
            metric,
        };
        w.validate()?;
        Ok(w)
    }

    /// Pure user-item recommender, `(1, 0)`.
    pub fn user_item(metric: Metric) -> Self {
        Self {
            user_item: 1.0,
            item_item: 0.0,
            metric,
        }
    }

    /// Pure item-item recommender, `(0, 1)`.
    pub fn item_item(metric: Metric) -> Self {
        Self {
            user_item: 0.0,
            item_item: 1.0,
            metric,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |w: f64| w >= 0.0 && w.is_finite();
        if !ok(self.user_item) || !ok(self.item_item) {
            return Err(Error::InvalidConfig(format!(
                "weights must be finite and non-negative, got ({}, {})",
                self.user_item, self.item_item
            )));
        }
        if self.user_item + self.item_item <= 0.0 {
            return Err(Error::ZeroWeights);
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn combine(&self, r: f64, s: f64) -> f64 {
        (self.user_item * r + self.item_item * s) / (self.user_item + self.item_item)
    }
}

impl fmt::Display for WeightConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{} {}", self.user_item, self.item_item, self.metric)
    }
}

pub fn user_item_score(e: &EmbeddingPair, user: usize, item: usize, metric: Metric) -> f64 {
    metric.similarity(e.user(user), e.item(item))
}

/// Mean similarity between `item` and the items of `history`; 0 for an empty history.
pub fn item_item_score(e: &EmbeddingPair, history: &[usize], item: usize, metric: Metric) -> f64 {
    if history.is_empty() {
        return 0.0;
    }
    let q = e.item(item);
    let total: f64 = history.iter().map(|&j| metric.similarity(q, e.item(j))).sum();
    total / history.len() as f64
}

pub fn weighted_score(r: f64, s: f64, w: &WeightConfig) -> Result<f64> {
    w.validate()?;
    Ok(w.combine(r, s))
}

/// Ranked recommendations for one user.
#[derive(Clone, Debug, PartialEq)]
pub struct RecommendationList {
    pub user: usize,
    pub items: Vec<usize>,
    pub scores: Vec<f64>,
}

impl RecommendationList {
    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn truncated(&self, n: usize) -> &[usize] {
        &self.items[..n.min(self.items.len())]
    }
}

/// Precomputed view of an [`EmbeddingPair`] for one metric.
pub struct Scorer<'a> {
    metric: Metric,
    users: Factors<'a>,
    items: Factors<'a>,
}

enum Factors<'a> {
    Borrowed(&'a DenseMatrix),
    Owned(DenseMatrix),
}

impl Factors<'_> {
    fn get(&self) -> &DenseMatrix {
        match self {
            Factors::Borrowed(m) => m,
            Factors::Owned(m) => m,
        }
    }
}

impl<'a> Scorer<'a> {
    pub fn new(e: &'a EmbeddingPair, metric: Metric) -> Self {
        let (users, items) = match metric {
            Metric::Dot => (Factors::Borrowed(e.users()), Factors::Borrowed(e.items())),
            Metric::Cosine => (
                Factors::Owned(e.users().normalized_rows()),
                Factors::Owned(e.items().normalized_rows()),
            ),
        };
        Self { metric, users, items }
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// `R(u, .)` over every item.
    pub fn user_item_scores(&self, user: usize) -> Vec<f64> {
        let p = self.users.get().row(user);
        self.items.get().iter_rows().map(|q| dot(p, q)).collect()
    }

    /// `S(u, .)` over every item for the given history.
    pub fn item_item_scores(&self, history: &[usize]) -> Vec<f64> {
        let items = self.items.get();
        if history.is_empty() {
            return vec![0.0; items.rows()];
        }
        let mut centroid = vec![0.0; items.cols()];
        for &j in history {
            for (c, v) in centroid.iter_mut().zip(items.row(j)) {
                *c += v;
            }
        }
        let k = history.len() as f64;
        centroid.iter_mut().for_each(|c| *c /= k);
        items.iter_rows().map(|q| dot(q, &centroid)).collect()
    }

    pub fn recommend(&self, user: usize, history: &[usize], w: &WeightConfig, n: usize) -> RecommendationList {
        debug_assert_eq!(w.metric, self.metric);
        let z: Vec<f64> = if w.item_item == 0.0 {
            self.user_item_scores(user).into_iter().map(|r| w.combine(r, 0.0)).collect()
        } else if w.user_item == 0.0 {
            self.item_item_scores(history).into_iter().map(|s| w.combine(0.0, s)).collect()
        } else {
            let r = self.user_item_scores(user);
            let s = self.item_item_scores(history);
            r.iter().zip(&s).map(|(&r, &s)| w.combine(r, s)).collect()
        };
        select_top(user, &z, history, n)
    }
}

/// Total order used for ranking: score descending, then item index ascending.
#[inline]
pub fn rank_order(a: (f64, usize), b: (f64, usize)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
}

/// The `n` best-scoring items outside the sorted `exclude` list.
pub fn select_top(user: usize, scores: &[f64], exclude: &[usize], n: usize) -> RecommendationList {
    let mut excl = exclude.iter().peekable();
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(scores.len().saturating_sub(exclude.len()));
    for (i, &s) in scores.iter().enumerate() {
        if excl.peek() == Some(&&i) {
            excl.next();
            continue;
        }
        cand.push((s, i));
    }
    if n < cand.len() {
        if n > 0 {
            cand.select_nth_unstable_by(n - 1, |a, b| rank_order(*a, *b));
        }
        cand.truncate(n);
    }
    cand.sort_unstable_by(|a, b| rank_order(*a, *b));
    let (scores, items) = cand.into_iter().unzip();
    RecommendationList { user, items, scores }
}

fn check_maps(e: &EmbeddingPair, m: &InteractionMatrix) -> Result<()> {
    if e.n_users() != m.n_users() || e.n_items() != m.n_items() {
        return Err(Error::MapMismatch(format!(
            "embeddings cover {}x{} but interactions cover {}x{}",
            e.n_users(),
            e.n_items(),
            m.n_users(),
            m.n_items()
        )));
    }
    Ok(())
}

/// Top-`n` lists for `users` (all users when `None`), excluding each user's
/// training history. Output follows the order of `users`.
pub fn top_n(
    e: &EmbeddingPair,
    m: &InteractionMatrix,
    w: &WeightConfig,
    n: usize,
    users: Option<&[usize]>,
) -> Result<Vec<RecommendationList>> {
    check_maps(e, m)?;
    w.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("list size must be at least 1".into()));
    }
    let all: Vec<usize>;
    let users = match users {
        Some(u) => {
            if let Some(&bad) = u.iter().find(|&&u| u >= m.n_users()) {
                return Err(Error::MapMismatch(format!("user index {bad} out of range")));
            }
            u
        }
        None => {
            all = (0..m.n_users()).collect();
            &all
        }
    };
    let scorer = Scorer::new(e, w.metric);
    Ok(users
        .par_iter()
        .map(|&u| scorer.recommend(u, m.row(u), w, n))
        .collect())
}

/// One line per list: `user_id<TAB>item_id:score,item_id:score,...`.
pub fn write_recommendations<W: Write>(
    lists: &[RecommendationList],
    user_map: &IdMap,
    item_map: &IdMap,
    mut w: W,
) -> std::io::Result<()> {
    for list in lists {
        w.write_all(user_map.id(list.user).as_bytes())?;
        w.write_all(b"\t")?;
        for (k, (&i, s)) in list.items.iter().zip(&list.scores).enumerate() {
            if k > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{}:{:.6}", item_map.id(i), s)?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(users: &[&[f64]], items: &[&[f64]]) -> EmbeddingPair {
        let d = users[0].len();
        let p = DenseMatrix::from_vec(users.len(), d, users.concat());
        let q = DenseMatrix::from_vec(items.len(), d, items.concat());
        EmbeddingPair::new(p, q, "t").unwrap()
    }

    #[test]
    fn user_item_examples() {
        let e = pair(&[&[1.0, 0.0], &[2.0, 0.0], &[1.0, 1.0]], &[&[1.0, 0.0], &[0.0, 3.0], &[2.0, 0.0]]);
        assert_eq!(user_item_score(&e, 0, 0, Metric::Dot), 1.0);
        assert_eq!(user_item_score(&e, 1, 1, Metric::Cosine), 0.0);
        assert_eq!(user_item_score(&e, 2, 2, Metric::Dot), 2.0);
        let c = user_item_score(&e, 2, 2, Metric::Cosine);
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn zero_norm_cosine_is_zero() {
        let e = pair(&[&[0.0, 0.0]], &[&[1.0, 2.0], &[0.0, 0.0]]);
        assert_eq!(user_item_score(&e, 0, 0, Metric::Cosine), 0.0);
        assert_eq!(item_item_score(&e, &[1], 0, Metric::Cosine), 0.0);
        let s = Scorer::new(&e, Metric::Cosine);
        assert_eq!(s.user_item_scores(0), vec![0.0, 0.0]);
    }

    #[test]
    fn item_item_examples() {
        let e = pair(&[&[0.0, 0.0]], &[&[1.0, 2.0], &[1.0, 2.0]]);
        assert_eq!(item_item_score(&e, &[1], 0, Metric::Dot), 5.0);
        let e = pair(&[&[0.0, 0.0]], &[&[1.0, 0.0], &[1.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(item_item_score(&e, &[1, 2], 0, Metric::Dot), 0.0);
        assert_eq!(item_item_score(&e, &[], 0, Metric::Dot), 0.0);
    }

    #[test]
    fn weighted_examples() {
        let eq = |w: (f64, f64)| WeightConfig::new(w.0, w.1, Metric::Dot).unwrap();
        assert!((weighted_score(0.4, 0.2, &eq((1.0, 1.0))).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(weighted_score(0.7, -3.0, &eq((1.0, 0.0))).unwrap(), 0.7);
        assert!((weighted_score(1.0, 0.0, &eq((1.0, 4.0))).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(WeightConfig::new(0.0, 0.0, Metric::Dot), Err(Error::ZeroWeights)));
        assert!(WeightConfig::new(-1.0, 2.0, Metric::Dot).is_err());
    }

    #[test]
    fn ties_break_by_index_and_history_excluded() {
        let list = select_top(0, &[1.0, 3.0, 3.0, -0.0, 0.0, 3.0], &[5], 4);
        assert_eq!(list.items, vec![1, 2, 0, 3]);
        let list = select_top(0, &[1.0, 2.0], &[0, 1], 3);
        assert!(list.is_empty());
        let list = select_top(0, &[1.0, 2.0, 0.5], &[], 10);
        assert_eq!(list.items, vec![1, 0, 2]);
    }

    #[test]
    fn top_n_rejects_mismatch() {
        let e = pair(&[&[1.0]], &[&[1.0], &[2.0]]);
        let m = InteractionMatrix::from_pairs(&[("u", "a")]).unwrap();
        let w = WeightConfig::user_item(Metric::Dot);
        assert!(matches!(top_n(&e, &m, &w, 1, None), Err(Error::MapMismatch(_))));
    }

    #[test]
    fn output_format() {
        let users = IdMap::from_ids(["u1"], "user").unwrap();
        let items = IdMap::from_ids(["a", "b"], "item").unwrap();
        let lists = vec![RecommendationList {
            user: 0,
            items: vec![1, 0],
            scores: vec![0.5, 1.0 / 3.0],
        }];
        let mut out = Vec::new();
        write_recommendations(&lists, &users, &items, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "u1\tb:0.500000,a:0.333333\n");
    }
}
