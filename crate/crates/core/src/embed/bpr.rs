//! Bayesian personalized ranking trained by sequential SGD over sampled
//! `(user, positive, negative)` triplets.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::init_factors;
use crate::embedding::{dot, DenseMatrix, EmbeddingPair};
use crate::error::{Error, Result};
use crate::interactions::InteractionMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BprConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub regularization: f64,
    pub dim: usize,
    #[serde(default)]
    pub seed: u64,
}

impl BprConfig {
    pub fn new(epochs: usize, learning_rate: f64, regularization: f64, dim: usize) -> Self {
        Self {
            epochs,
            learning_rate,
            regularization,
            dim,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("bpr: {m}")));
        if self.epochs == 0 {
            return bad("epochs must be positive");
        }
        // a zero step is allowed and leaves the initialization untouched
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be non-negative");
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return bad("regularization must be non-negative");
        }
        if self.dim == 0 {
            return bad("dim must be positive");
        }
        Ok(())
    }

    pub fn describe(&self) -> String {
        format!(
            "bpr epochs={} lr={} reg={} dim={} seed={}",
            self.epochs, self.learning_rate, self.regularization, self.dim, self.seed
        )
    }
}

/// `-ln sigmoid(p_u . (q_i - q_j)) + reg/2 (|p_u|^2 + |q_i|^2 + |q_j|^2)`.
pub fn triplet_loss(user: &[f64], positive: &[f64], negative: &[f64], reg: f64) -> f64 {
    let x = dot(user, positive) - dot(user, negative);
    // -ln sigmoid(x) = ln(1 + e^-x), computed without overflow
    let nll = if x > 0.0 {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    };
    nll + 0.5 * reg * (dot(user, user) + dot(positive, positive) + dot(negative, negative))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TripletGradient {
    pub user: Vec<f64>,
    pub positive: Vec<f64>,
    pub negative: Vec<f64>,
}

/// Analytic gradient of [`triplet_loss`].
pub fn triplet_gradient(user: &[f64], positive: &[f64], negative: &[f64], reg: f64) -> TripletGradient {
    let x = dot(user, positive) - dot(user, negative);
    let z = sigmoid(-x);
    TripletGradient {
        user: (0..user.len())
            .map(|k| -z * (positive[k] - negative[k]) + reg * user[k])
            .collect(),
        positive: (0..user.len()).map(|k| -z * user[k] + reg * positive[k]).collect(),
        negative: (0..user.len()).map(|k| z * user[k] + reg * negative[k]).collect(),
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub struct BprTrainer<'a> {
    matrix: &'a InteractionMatrix,
    cfg: BprConfig,
    rng: ChaCha8Rng,
    samples: Vec<(usize, usize)>,
    users: DenseMatrix,
    items: DenseMatrix,
    epoch: usize,
}

impl<'a> BprTrainer<'a> {
    pub fn new(matrix: &'a InteractionMatrix, cfg: BprConfig) -> Result<Self> {
        cfg.validate()?;
        if matrix.n_items() < 2 {
            return Err(Error::InvalidConfig("bpr: needs at least two items".into()));
        }
        let n_items = matrix.n_items();
        let mut saturated = 0;
        let samples: Vec<(usize, usize)> = (0..matrix.n_users())
            .filter(|&u| {
                let full = matrix.row(u).len() == n_items;
                if full {
                    saturated += 1;
                    log::warn!("bpr: user {} consumed every item; skipped", matrix.user_map().id(u));
                }
                !full
            })
            .flat_map(|u| matrix.row(u).iter().map(move |&i| (u, i)))
            .collect();
        if saturated == matrix.n_users() {
            return Err(Error::InvalidConfig("bpr: no user has a negative item".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let users = init_factors(&mut rng, matrix.n_users(), cfg.dim);
        let items = init_factors(&mut rng, matrix.n_items(), cfg.dim);
        Ok(Self {
            matrix,
            cfg,
            rng,
            samples,
            users,
            items,
            epoch: 0,
        })
    }

    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// One epoch of |R| triplets sampled with replacement.
    pub fn step(&mut self) -> Result<()> {
        let n_items = self.matrix.n_items();
        let lr = self.cfg.learning_rate;
        let reg = self.cfg.regularization;
        let d = self.cfg.dim;
        let mut pu = vec![0.0; d];
        for _ in 0..self.matrix.interaction_count() {
            let (u, i) = self.samples[self.rng.gen_range(0..self.samples.len())];
            let j = loop {
                let j = self.rng.gen_range(0..n_items);
                if !self.matrix.contains(u, j) {
                    break j;
                }
            };
            pu.copy_from_slice(self.users.row(u));
            let qi = self.items.row(i);
            let qj = self.items.row(j);
            let z = sigmoid(dot(&pu, qj) - dot(&pu, qi));
            let user = self.users.row_mut(u);
            for k in 0..d {
                user[k] -= lr * (-z * (qi[k] - qj[k]) + reg * pu[k]);
            }
            let qi = self.items.row_mut(i);
            for k in 0..d {
                qi[k] -= lr * (-z * pu[k] + reg * qi[k]);
            }
            let qj = self.items.row_mut(j);
            for k in 0..d {
                qj[k] -= lr * (z * pu[k] + reg * qj[k]);
            }
        }
        self.epoch += 1;
        if !self.users.is_finite() || !self.items.is_finite() {
            return Err(Error::TrainingDiverged {
                learner: "bpr",
                epoch: self.epoch,
            });
        }
        Ok(())
    }

    pub fn embeddings(&self) -> EmbeddingPair {
        let cfg = BprConfig {
            epochs: self.epoch,
            ..self.cfg
        };
        EmbeddingPair::new(self.users.clone(), self.items.clone(), cfg.describe())
            .expect("factors are checked finite after every step")
    }

    pub fn into_embeddings(self) -> EmbeddingPair {
        let source = self.cfg.describe();
        EmbeddingPair::new(self.users, self.items, source)
            .expect("factors are checked finite after every step")
    }
}

pub fn train_bpr(matrix: &InteractionMatrix, cfg: &BprConfig) -> Result<EmbeddingPair> {
    let mut t = BprTrainer::new(matrix, *cfg)?;
    for _ in 0..cfg.epochs {
        t.step()?;
    }
    Ok(t.into_embeddings())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgd_update_follows_gradient() {
        // one epoch on a single-interaction matrix is exactly one triplet step
        let m = InteractionMatrix::from_pairs(&[("u", "a"), ("v", "b")]).unwrap();
        let cfg = BprConfig::new(1, 0.5, 0.1, 3).with_seed(9);
        let mut t = BprTrainer::new(&m, cfg).unwrap();
        let before = t.embeddings();
        t.step().unwrap();
        let after = t.embeddings();
        let moved: Vec<usize> = (0..2)
            .filter(|&u| before.user(u) != after.user(u))
            .collect();
        assert!(!moved.is_empty());
    }

    #[test]
    fn saturated_user_skipped() {
        let m = InteractionMatrix::from_pairs(&[("u", "a"), ("u", "b"), ("v", "a")]).unwrap();
        let t = BprTrainer::new(&m, BprConfig::new(1, 0.1, 0.0, 2)).unwrap();
        assert_eq!(t.samples, vec![(1, 0)]);
        let all = InteractionMatrix::from_pairs(&[("u", "a"), ("u", "b")]).unwrap();
        assert!(BprTrainer::new(&all, BprConfig::new(1, 0.1, 0.0, 2)).is_err());
        let one = InteractionMatrix::from_pairs(&[("u", "a")]).unwrap();
        assert!(BprTrainer::new(&one, BprConfig::new(1, 0.1, 0.0, 2)).is_err());
    }

    #[test]
    fn loss_is_stable_for_large_margins() {
        let l = triplet_loss(&[100.0], &[10.0], &[-10.0], 0.0);
        assert!((0.0..1e-12).contains(&l));
        let l = triplet_loss(&[100.0], &[-10.0], &[10.0], 0.0);
        assert!((l - 2000.0).abs() < 1e-9);
    }
}
