//! Dense user and item factor matrices sharing one latent space.

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must equal rows * cols");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks_exact(0) panics
        self.data.chunks_exact(self.cols.max(1)).take(self.rows)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copy with every row scaled to unit L2 norm; zero rows stay zero.
    pub fn normalized_rows(&self) -> DenseMatrix {
        let mut out = self.clone();
        if self.cols == 0 {
            return out;
        }
        for row in out.data.chunks_exact_mut(self.cols) {
            let norm = norm(row);
            if norm > 0.0 {
                row.iter_mut().for_each(|v| *v /= norm);
            }
        }
        out
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// User factors `P` (|U| × d) and item factors `Q` (|I| × d).
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingPair {
    users: DenseMatrix,
    items: DenseMatrix,
    source: String,
}

impl EmbeddingPair {
    pub fn new(users: DenseMatrix, items: DenseMatrix, source: impl Into<String>) -> Result<Self> {
        if users.cols() != items.cols() {
            return Err(Error::MapMismatch(format!(
                "user dimension {} differs from item dimension {}",
                users.cols(),
                items.cols()
            )));
        }
        if !users.is_finite() || !items.is_finite() {
            return Err(Error::MapMismatch("embeddings contain non-finite values".into()));
        }
        Ok(Self {
            users,
            items,
            source: source.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.users.cols()
    }

    pub fn n_users(&self) -> usize {
        self.users.rows()
    }

    pub fn n_items(&self) -> usize {
        self.items.rows()
    }

    pub fn user(&self, u: usize) -> &[f64] {
        self.users.row(u)
    }

    pub fn item(&self, i: usize) -> &[f64] {
        self.items.row(i)
    }

    pub fn users(&self) -> &DenseMatrix {
        &self.users
    }

    pub fn items(&self) -> &DenseMatrix {
        &self.items
    }

    /// Free-form provenance, e.g. learner name and hyperparameters.
    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn into_parts(self) -> (DenseMatrix, DenseMatrix, String) {
        (self.users, self.items, self.source)
    }
}
