//! Seeded synthetic implicit-feedback datasets with planted cluster structure.
//!
//! Users and items are split into `clusters` groups; a user draws most of
//! their items from their own group, with a popularity skew inside each
//! group. Useful for examples, tests and timing runs when no public dataset
//! is at hand.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interactions::InteractionMatrix;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub users: usize,
    pub items: usize,
    /// Target interaction count before deduplication.
    pub interactions: usize,
    pub clusters: usize,
    /// Probability that an interaction ignores the user's cluster.
    pub noise: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(users: usize, items: usize, interactions: usize) -> Self {
        Self {
            users,
            items,
            interactions,
            clusters: 4,
            noise: 0.1,
            seed: 0,
        }
    }

    pub fn with_clusters(mut self, clusters: usize) -> Self {
        self.clusters = clusters;
        self
    }

    pub fn with_noise(mut self, noise: f64) -> Self {
        self.noise = noise;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Same shape as the Filmtrust benchmark: 1492 users, 1881 items,
    /// about 28.6k interactions.
    pub fn filmtrust_sized() -> Self {
        Self::new(1492, 1881, 29_500).with_clusters(12).with_noise(0.2)
    }
}

/// Generates the dataset. Every user gets at least one interaction; ids are
/// `u<k>` and `i<k>`.
pub fn generate(spec: &SyntheticSpec) -> Result<InteractionMatrix> {
    if spec.users == 0 || spec.items == 0 || spec.clusters == 0 || spec.clusters > spec.items {
        return Err(Error::InvalidConfig(format!("bad synthetic spec {spec:?}")));
    }
    if !(0.0..=1.0).contains(&spec.noise) {
        return Err(Error::InvalidConfig(format!("noise {} outside [0, 1]", spec.noise)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let groups: Vec<Vec<usize>> = (0..spec.clusters)
        .map(|c| (c..spec.items).step_by(spec.clusters).collect())
        .collect();
    let mut seen = vec![Vec::<usize>::new(); spec.users];
    let mut pairs = Vec::with_capacity(spec.interactions);
    let mut push = |u: usize, i: usize, pairs: &mut Vec<(String, String)>| {
        if !seen[u].contains(&i) {
            seen[u].push(i);
            pairs.push((format!("u{u}"), format!("i{i}")));
        }
    };
    let draw = |rng: &mut ChaCha8Rng, pool: &[usize]| {
        // squaring a uniform draw favors the front of the pool
        let x: f64 = rng.gen();
        pool[((x * x) * pool.len() as f64) as usize % pool.len()]
    };
    let all: Vec<usize> = (0..spec.items).collect();
    for k in 0..spec.interactions.max(spec.users) {
        let u = if k < spec.users { k } else { rng.gen_range(0..spec.users) };
        let pool = if rng.gen::<f64>() < spec.noise {
            &all
        } else {
            &groups[u % spec.clusters]
        };
        let i = draw(&mut rng, pool);
        push(u, i, &mut pairs);
    }
    InteractionMatrix::from_pairs(&pairs)
}
