use std::collections::BTreeMap;

use super::embedding::EmbeddingTable;
use super::tensor::Tensor;
use crate::preprocess::{IndexSequence, PAD_INDEX};
use crate::{Error, Result, Rng};

/// Gradient of the loss with respect to every parameter of a network.
/// Embedding gradients are kept per touched row.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub embedding: BTreeMap<usize, Vec<f64>>,
    pub dense: Vec<Tensor>,
}

impl Gradients {
    pub(crate) fn zeros_like(params: &[(&'static str, &Tensor)]) -> Self {
        Gradients { embedding: BTreeMap::new(), dense: params.iter().map(|(_, t)| Tensor::zeros(t.shape())).collect() }
    }

    pub(crate) fn add_embedding_row(&mut self, index: usize, grad: &[f64]) {
        if index == PAD_INDEX {
            return;
        }
        let row = self.embedding.entry(index).or_insert_with(|| vec![0.0; grad.len()]);
        for (r, g) in row.iter_mut().zip(grad) {
            *r += g;
        }
    }

    pub fn norm(&self) -> f64 {
        let dense: f64 = self.dense.iter().map(Tensor::norm_sq).sum();
        let emb: f64 = self.embedding.values().flatten().map(|g| g * g).sum();
        (dense + emb).sqrt()
    }

    pub fn scale(&mut self, alpha: f64) {
        self.dense.iter_mut().for_each(|t| t.scale(alpha));
        self.embedding.values_mut().flatten().for_each(|g| *g *= alpha);
    }
}

/// Shared interface of the three sequence classifiers.
pub(crate) trait Network {
    fn n_classes(&self) -> usize;
    fn embedding(&self) -> &EmbeddingTable;
    fn embedding_mut(&mut self) -> &mut EmbeddingTable;
    /// Every parameter except the embedding, in a fixed order.
    fn dense_params(&self) -> Vec<(&'static str, &Tensor)>;
    fn dense_params_mut(&mut self) -> Vec<&mut Tensor>;
    /// Per-example training noise (a dropout mask), if the network uses any.
    fn sample_noise(&self, _rng: &mut Rng) -> Option<Vec<f64>> {
        None
    }
    fn logits(&self, seq: &IndexSequence, noise: Option<&[f64]>) -> Result<Vec<f64>>;
    /// Add the gradient of `-ln p(label)` into `grads` and return the loss.
    fn accumulate(
        &self,
        seq: &IndexSequence,
        label: usize,
        noise: Option<&[f64]>,
        grads: &mut Gradients,
    ) -> Result<f64>;
}

pub(crate) fn check_label(label: usize, n_classes: usize) -> Result<()> {
    if label >= n_classes {
        return Err(Error::InvalidArgument(format!("label index {label} outside {n_classes} classes")));
    }
    Ok(())
}

/// `p - onehot(label)`: the gradient of cross-entropy with respect to the logits.
pub(crate) fn logit_gradient(logits: &[f64], label: usize) -> Vec<f64> {
    let mut g = super::tensor::softmax(logits);
    g[label] -= 1.0;
    g
}
