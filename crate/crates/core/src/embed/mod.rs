//! Embedding learners and the embedding exchange file.

mod als;
mod bpr;
mod io;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::embedding::DenseMatrix;

pub use als::{als_loss, train_als, AlsConfig, AlsSolver, AlsTrainer};
pub use bpr::{train_bpr, triplet_gradient, triplet_loss, BprConfig, BprTrainer, TripletGradient};
pub use io::{export_embeddings, import_embeddings, read_embeddings, write_embeddings};

const INIT_RANGE: f64 = 0.01;

/// Uniform `[-0.01, 0.01]` factors drawn row by row from `rng`.
fn init_factors(rng: &mut ChaCha8Rng, rows: usize, dim: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, dim, |_, _| rng.gen_range(-INIT_RANGE..=INIT_RANGE))
}
