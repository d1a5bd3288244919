use std::collections::BTreeMap;

use super::tensor::Tensor;
use crate::preprocess::{IndexSequence, PAD_INDEX};
use crate::{Error, Result, Rng};

/// Trainable look-up table, one row per vocabulary index. Row 0 (PAD) stays zero.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    weights: Tensor,
}

impl EmbeddingTable {
    /// Rows are drawn uniformly with bound `sqrt(6 / (1 + dim))`: each lookup
    /// reads a single row, so the fan-in is 1.
    pub fn new(rows: usize, dim: usize, rng: &mut Rng) -> Self {
        let mut weights = Tensor::glorot(&[rows, dim], 1, dim, rng);
        weights.row_mut(PAD_INDEX).fill(0.0);
        EmbeddingTable { weights }
    }

    pub fn from_tensor(weights: Tensor) -> Result<Self> {
        if weights.shape().len() != 2 || weights.rows() < 2 {
            return Err(Error::InvalidArgument(format!(
                "embedding needs a [rows >= 2 × dim] matrix, got {:?}",
                weights.shape()
            )));
        }
        if weights.row(PAD_INDEX).iter().any(|&v| v != 0.0) {
            return Err(Error::InvalidArgument("PAD embedding row must be zero".into()));
        }
        Ok(EmbeddingTable { weights })
    }

    pub fn rows(&self) -> usize {
        self.weights.rows()
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn weights(&self) -> &Tensor {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut Tensor {
        &mut self.weights
    }

    pub fn row(&self, index: usize) -> &[f64] {
        self.weights.row(index)
    }

    /// Overwrite a non-PAD row.
    pub fn set_row(&mut self, index: usize, values: &[f64]) -> Result<()> {
        if index == PAD_INDEX || index >= self.rows() || values.len() != self.dim() {
            return Err(Error::InvalidArgument(format!("cannot set embedding row {index}")));
        }
        self.weights.row_mut(index).copy_from_slice(values);
        Ok(())
    }

    /// `[len × dim]` matrix whose row `t` is the embedding of `seq[t]`.
    pub fn lookup(&self, seq: &IndexSequence) -> Result<Tensor> {
        let dim = self.dim();
        let mut data = Vec::with_capacity(seq.len() * dim);
        for &i in seq.indices() {
            if i >= self.rows() {
                return Err(Error::InvalidArgument(format!(
                    "index {i} outside an embedding table of {} rows",
                    self.rows()
                )));
            }
            data.extend_from_slice(self.row(i));
        }
        Tensor::from_vec(&[seq.len(), dim], data)
    }

    /// Apply `row -= lr * grad` for every row gradient except PAD.
    pub(crate) fn apply(&mut self, grads: &BTreeMap<usize, Vec<f64>>, lr: f64) {
        for (&row, g) in grads {
            if row == PAD_INDEX {
                continue;
            }
            for (w, gv) in self.weights.row_mut(row).iter_mut().zip(g) {
                *w -= lr * gv;
            }
        }
    }
}

/// Look up a sequence in `table`.
pub fn embed(table: &EmbeddingTable, seq: &IndexSequence) -> Result<Tensor> {
    table.lookup(seq)
}
