use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::interactions::InteractionMatrix;

pub const FOLD_COUNT: usize = 5;

/// Held-out items of one user, sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UserTest {
    pub user: usize,
    pub items: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct Fold {
    /// The other four folds, over the full id maps of the source matrix.
    pub train: InteractionMatrix,
    /// Test pairs whose user and item both occur in `train`, sorted.
    pub test: Vec<(usize, usize)>,
    /// Test pairs dropped because their user or item is absent from `train`.
    pub cold_start_dropped: usize,
}

impl Fold {
    /// Test pairs grouped by user, users ascending.
    pub fn test_by_user(&self) -> Vec<UserTest> {
        let mut out: Vec<UserTest> = Vec::new();
        for &(u, i) in &self.test {
            match out.last_mut() {
                Some(t) if t.user == u => t.items.push(i),
                _ => out.push(UserTest { user: u, items: vec![i] }),
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct FoldSplit {
    pub seed: u64,
    pub folds: Vec<Fold>,
}

/// Seeded shuffle of all interactions dealt round-robin into five folds.
pub fn split_folds(m: &InteractionMatrix, seed: u64) -> Result<FoldSplit> {
    let total = m.interaction_count();
    if total < FOLD_COUNT {
        return Err(Error::TooFewInteractions(total));
    }
    let mut pairs: Vec<(usize, usize)> = m.iter().collect();
    pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut buckets: Vec<Vec<(usize, usize)>> = (0..FOLD_COUNT)
        .map(|_| Vec::with_capacity(total / FOLD_COUNT + 1))
        .collect();
    for (k, p) in pairs.into_iter().enumerate() {
        buckets[k % FOLD_COUNT].push(p);
    }

    let mut folds = Vec::with_capacity(FOLD_COUNT);
    for f in 0..FOLD_COUNT {
        let train_pairs = buckets
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, b)| b.iter().copied());
        let train = InteractionMatrix::from_indexed(m.user_map().clone(), m.item_map().clone(), train_pairs)?;
        let item_counts = train.item_counts();
        let mut test: Vec<(usize, usize)> = buckets[f]
            .iter()
            .copied()
            .filter(|&(u, i)| !train.row(u).is_empty() && item_counts[i] > 0)
            .collect();
        test.sort_unstable();
        let cold_start_dropped = buckets[f].len() - test.len();
        folds.push(Fold {
            train,
            test,
            cold_start_dropped,
        });
    }
    Ok(FoldSplit { seed, folds })
}
