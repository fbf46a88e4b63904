//! Alternating least squares for implicit feedback.
//!
//! Each observed pair carries preference 1 with confidence `1 + alpha`;
//! every unobserved pair carries preference 0 with confidence 1. A pass
//! solves the ridge system of every user against the fixed item factors,
//! then of every item against the new user factors.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::init_factors;
use crate::embedding::{dot, DenseMatrix, EmbeddingPair};
use crate::error::{Error, Result};
use crate::interactions::InteractionMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AlsSolver {
    /// Exact Cholesky solve of each d × d system.
    Cholesky,
    /// A fixed number of conjugate-gradient steps warm-started from the
    /// current factors. Each step can only lower the per-row objective.
    ConjugateGradient { steps: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlsConfig {
    pub epochs: usize,
    pub regularization: f64,
    pub dim: usize,
    #[serde(default = "default_confidence")]
    pub confidence_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_solver")]
    pub solver: AlsSolver,
}

fn default_confidence() -> f64 {
    40.0
}

fn default_solver() -> AlsSolver {
    AlsSolver::Cholesky
}

impl AlsConfig {
    pub fn new(epochs: usize, regularization: f64, dim: usize) -> Self {
        Self {
            epochs,
            regularization,
            dim,
            confidence_scale: default_confidence(),
            seed: 0,
            solver: default_solver(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("als: {m}")));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        if !(self.regularization > 0.0 && self.regularization.is_finite()) {
            return bad("regularization must be positive");
        }
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        if !(self.confidence_scale > 0.0 && self.confidence_scale.is_finite()) {
            return bad("confidence_scale must be positive");
        }
        if let AlsSolver::ConjugateGradient { steps: 0 } = self.solver {
            return bad("conjugate gradient needs at least one step");
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        let solver = match self.solver {
            AlsSolver::Cholesky => String::new(),
            AlsSolver::ConjugateGradient { steps } => format!(" cg={steps}"),
        };
        format!(
            "als epochs={} reg={} dim={} alpha={} seed={}{}",
            self.epochs, self.regularization, self.dim, self.confidence_scale, self.seed, solver
        )
    }
}

/// Epoch-by-epoch ALS. Running `k` steps yields exactly the factors of a
/// `k`-epoch training run with the same seed.
pub struct AlsTrainer<'a> {
    matrix: &'a InteractionMatrix,
    item_major: Vec<Vec<usize>>,
    cfg: AlsConfig,
    users: DenseMatrix,
    items: DenseMatrix,
    epoch: usize,
}

impl<'a> AlsTrainer<'a> {
    pub fn new(matrix: &'a InteractionMatrix, cfg: AlsConfig) -> Result<Self> {
        cfg.validate()?;
        if matrix.n_users() == 0 || matrix.n_items() == 0 {
            return Err(Error::InvalidConfig("als: empty interaction matrix".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let users = init_factors(&mut rng, matrix.n_users(), cfg.dim);
        let items = init_factors(&mut rng, matrix.n_items(), cfg.dim);
        Ok(Self {
            matrix,
            item_major: matrix.item_major(),
            cfg,
            users,
            items,
            epoch: 0,
        })
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// One full alternating pass (users, then items).
    pub fn step(&mut self) -> Result<()> {
        let rows: Vec<&[usize]> = (0..self.matrix.n_users()).map(|u| self.matrix.row(u)).collect();
        solve_side(&mut self.users, &self.items, &rows, &self.cfg);
        let cols: Vec<&[usize]> = self.item_major.iter().map(Vec::as_slice).collect();
        solve_side(&mut self.items, &self.users, &cols, &self.cfg);
        self.epoch += 1;
        if !self.users.is_finite() || !self.items.is_finite() {
            return Err(Error::TrainingDiverged {
                learner: "als",
                epoch: self.epoch,
            });
        }
        Ok(())
    }

    pub fn embeddings(&self) -> EmbeddingPair {
        let cfg = AlsConfig {
            epochs: self.epoch,
            ..self.cfg
        };
        EmbeddingPair::new(self.users.clone(), self.items.clone(), cfg.describe())
            .expect("factors are checked finite after every step")
    }

    pub fn loss(&self) -> f64 {
        loss_of(self.matrix, &self.users, &self.items, &self.cfg)
    }

    pub fn into_embeddings(self) -> EmbeddingPair {
        let source = self.cfg.describe();
        EmbeddingPair::new(self.users, self.items, source)
            .expect("factors are checked finite after every step")
    }
}

pub fn train_als(matrix: &InteractionMatrix, cfg: &AlsConfig) -> Result<EmbeddingPair> {
    let mut t = AlsTrainer::new(matrix, *cfg)?;
    for _ in 0..cfg.epochs {
        t.step()?;
    }
    Ok(t.into_embeddings())
}

/// Confidence-weighted squared error over all user-item cells plus the L2
/// penalty on both factor matrices.
pub fn als_loss(matrix: &InteractionMatrix, e: &EmbeddingPair, cfg: &AlsConfig) -> f64 {
    loss_of(matrix, e.users(), e.items(), cfg)
}

fn gram(m: &DenseMatrix) -> Vec<f64> {
    let d = m.cols();
    let mut g = vec![0.0; d * d];
    for row in m.iter_rows() {
        for a in 0..d {
            let ra = row[a];
            let ga = &mut g[a * d..(a + 1) * d];
            for b in a..d {
                ga[b] += ra * row[b];
            }
        }
    }
    for a in 0..d {
        for b in 0..a {
            g[a * d + b] = g[b * d + a];
        }
    }
    g
}

fn loss_of(matrix: &InteractionMatrix, users: &DenseMatrix, items: &DenseMatrix, cfg: &AlsConfig) -> f64 {
    // sum over all cells of s^2 = <X^T X, Y^T Y>; observed cells then swap
    // s^2 for c (1 - s)^2
    let gx = gram(users);
    let gy = gram(items);
    let mut total: f64 = gx.iter().zip(&gy).map(|(a, b)| a * b).sum();
    let c = 1.0 + cfg.confidence_scale;
    for (u, i) in matrix.iter() {
        let s = dot(users.row(u), items.row(i));
        total += c * (1.0 - s) * (1.0 - s) - s * s;
    }
    let l2: f64 = users.as_slice().iter().chain(items.as_slice()).map(|v| v * v).sum();
    total + cfg.regularization * l2
}

/// Re-solves every row of `target` against the fixed `other` factors.
fn solve_side(target: &mut DenseMatrix, other: &DenseMatrix, lists: &[&[usize]], cfg: &AlsConfig) {
    let d = cfg.dim;
    let g = gram(other);
    let alpha = cfg.confidence_scale;
    let lambda = cfg.regularization;
    let current = &*target;
    let solved: Vec<Vec<f64>> = lists
        .par_iter()
        .enumerate()
        .map(|(r, &list)| match cfg.solver {
            AlsSolver::Cholesky => solve_direct(&g, other, list, d, alpha, lambda),
            AlsSolver::ConjugateGradient { steps } => {
                solve_cg(&g, other, list, current.row(r), alpha, lambda, steps)
            }
        })
        .collect();
    for (r, x) in solved.into_iter().enumerate() {
        target.row_mut(r).copy_from_slice(&x);
    }
}

fn solve_direct(g: &[f64], other: &DenseMatrix, list: &[usize], d: usize, alpha: f64, lambda: f64) -> Vec<f64> {
    let mut a = DMatrix::from_row_slice(d, d, g);
    let mut b = DVector::zeros(d);
    for &j in list {
        let y = other.row(j);
        for p in 0..d {
            let ayp = alpha * y[p];
            for q in p..d {
                a[(p, q)] += ayp * y[q];
            }
            b[p] += (1.0 + alpha) * y[p];
        }
    }
    for p in 0..d {
        for q in 0..p {
            a[(p, q)] = a[(q, p)];
        }
        a[(p, p)] += lambda;
    }
    let chol = a
        .cholesky()
        .expect("ridge system with positive regularization is positive definite");
    chol.solve(&b).as_slice().to_vec()
}

fn solve_cg(
    g: &[f64],
    other: &DenseMatrix,
    list: &[usize],
    x0: &[f64],
    alpha: f64,
    lambda: f64,
    steps: usize,
) -> Vec<f64> {
    let d = x0.len();
    let apply = |v: &[f64], out: &mut [f64]| {
        for p in 0..d {
            out[p] = dot(&g[p * d..(p + 1) * d], v) + lambda * v[p];
        }
        for &j in list {
            let y = other.row(j);
            let s = alpha * dot(y, v);
            for p in 0..d {
                out[p] += s * y[p];
            }
        }
    };
    let mut x = x0.to_vec();
    let mut ax = vec![0.0; d];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = ax.iter().map(|v| -v).collect();
    for &j in list {
        for (rp, yp) in r.iter_mut().zip(other.row(j)) {
            *rp += (1.0 + alpha) * yp;
        }
    }
    let mut p = r.clone();
    let mut rs = dot(&r, &r);
    let mut ap = vec![0.0; d];
    for _ in 0..steps {
        if rs < 1e-20 {
            break;
        }
        apply(&p, &mut ap);
        let step = rs / dot(&p, &ap);
        for k in 0..d {
            x[k] += step * p[k];
            r[k] -= step * ap[k];
        }
        let rs_new = dot(&r, &r);
        let beta = rs_new / rs;
        for k in 0..d {
            p[k] = r[k] + beta * p[k];
        }
        rs = rs_new;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> InteractionMatrix {
        let pairs: Vec<(String, String)> = (0..10)
            .flat_map(|u| {
                (0..10)
                    .filter(move |i| (u * 7 + i * 3) % 4 == 0 || u == *i)
                    .map(move |i| (format!("u{u}"), format!("i{i}")))
            })
            .collect();
        InteractionMatrix::from_pairs(&pairs).unwrap()
    }

    fn brute_loss(m: &InteractionMatrix, e: &EmbeddingPair, cfg: &AlsConfig) -> f64 {
        let mut total = 0.0;
        for u in 0..m.n_users() {
            for i in 0..m.n_items() {
                let s = dot(e.user(u), e.item(i));
                let (p, c) = if m.contains(u, i) {
                    (1.0, 1.0 + cfg.confidence_scale)
                } else {
                    (0.0, 1.0)
                };
                total += c * (p - s) * (p - s);
            }
        }
        let l2: f64 = e.users().as_slice().iter().chain(e.items().as_slice()).map(|v| v * v).sum();
        total + cfg.regularization * l2
    }

    #[test]
    fn loss_matches_brute_force() {
        let m = toy();
        let cfg = AlsConfig::new(3, 0.1, 4).with_seed(3);
        let e = train_als(&m, &cfg).unwrap();
        let fast = als_loss(&m, &e, &cfg);
        let slow = brute_loss(&m, &e, &cfg);
        assert!((fast - slow).abs() <= 1e-9 * slow.max(1.0), "{fast} vs {slow}");
    }

    #[test]
    fn direct_solve_is_row_optimum() {
        // gradient of the per-user objective vanishes after a user pass
        let m = toy();
        let cfg = AlsConfig::new(1, 0.01, 3).with_seed(1);
        let mut t = AlsTrainer::new(&m, cfg).unwrap();
        t.step().unwrap();
        let rows: Vec<&[usize]> = (0..m.n_users()).map(|u| m.row(u)).collect();
        let items = t.items.clone();
        solve_side(&mut t.users, &items, &rows, &cfg);
        for u in 0..m.n_users() {
            let x = t.users.row(u);
            let mut grad = vec![0.0; 3];
            for i in 0..m.n_items() {
                let y = items.row(i);
                let s = dot(x, y);
                let (p, c) = if m.contains(u, i) { (1.0, 41.0) } else { (0.0, 1.0) };
                for k in 0..3 {
                    grad[k] += 2.0 * c * (s - p) * y[k];
                }
            }
            for k in 0..3 {
                grad[k] += 2.0 * cfg.regularization * x[k];
                assert!(grad[k].abs() < 1e-8, "user {u}: {grad:?}");
            }
        }
    }

    #[test]
    fn cg_loss_non_increasing() {
        let m = toy();
        let cfg = AlsConfig {
            solver: AlsSolver::ConjugateGradient { steps: 3 },
            ..AlsConfig::new(20, 0.01, 4).with_seed(5)
        };
        let mut t = AlsTrainer::new(&m, cfg).unwrap();
        let mut prev = t.loss();
        for _ in 0..20 {
            t.step().unwrap();
            let l = t.loss();
            assert!(l <= prev * (1.0 + 1e-12), "{l} > {prev}");
            prev = l;
        }
    }

    #[test]
    fn invalid_configs() {
        assert!(AlsConfig::new(0, 0.1, 4).validate().is_err());
        assert!(AlsConfig::new(1, 0.0, 4).validate().is_err());
        assert!(AlsConfig::new(1, 0.1, 0).validate().is_err());
        let empty = InteractionMatrix::from_pairs::<&str, &str>(&[]).unwrap();
        assert!(AlsTrainer::new(&empty, AlsConfig::new(1, 0.1, 2)).is_err());
    }
}
