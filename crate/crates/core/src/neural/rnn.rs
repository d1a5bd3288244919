use super::embedding::EmbeddingTable;
use super::tensor::Tensor;
use crate::preprocess::IndexSequence;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RnnConfig {
    pub vocab_rows: usize,
    pub embed_dim: usize,
    pub hidden_size: usize,
    pub head_size: usize,
    pub n_classes: usize,
}

impl RnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vocab_rows < 2 || self.embed_dim == 0 || self.hidden_size == 0 || self.head_size == 0 {
            return Err(Error::InvalidArgument(
                "rnn needs vocab_rows >= 2 and positive embed, hidden and head sizes".into(),
            ));
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidArgument("need at least 2 classes".into()));
        }
        Ok(())
    }

    pub(crate) fn check_embedding(&self, table: &EmbeddingTable) -> Result<()> {
        if table.rows() != self.vocab_rows || table.dim() != self.embed_dim {
            return Err(Error::Format("embedding has the wrong shape".into()));
        }
        Ok(())
    }

    pub(crate) fn check_shapes(&self, tensors: &[Tensor], expected: &[Vec<usize>]) -> Result<()> {
        if tensors.len() != expected.len() {
            return Err(Error::Format(format!("expected {} parameter tensors, got {}", expected.len(), tensors.len())));
        }
        for (t, s) in tensors.iter().zip(expected) {
            if t.shape() != s.as_slice() {
                return Err(Error::Format(format!("tensor shape {:?}, expected {s:?}", t.shape())));
            }
        }
        Ok(())
    }
}

/// `[x_t; h]` for every real position `t`.
pub(crate) fn concat(x: &[f64], h: &[f64]) -> Vec<f64> {
    let mut z = Vec::with_capacity(x.len() + h.len());
    z.extend_from_slice(x);
    z.extend_from_slice(h);
    z
}

pub(crate) fn inputs<'a>(table: &'a EmbeddingTable, seq: &IndexSequence) -> Result<Vec<&'a [f64]>> {
    seq.tokens()
        .iter()
        .map(|&i| {
            if i >= table.rows() {
                Err(Error::InvalidArgument(format!("index {i} outside an embedding table of {} rows", table.rows())))
            } else {
                Ok(table.row(i))
            }
        })
        .collect()
}
