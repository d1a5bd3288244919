//! Dense tensors and the CNN, LSTM and GRU sentence classifiers, trained
//! with mini-batch SGD and hand-written backpropagation.

mod cnn;
mod embedding;
mod gradcheck;
mod gru;
mod head;
mod lstm;
mod network;
mod rnn;
mod tensor;
mod train;

use std::fmt;
use std::str::FromStr;

pub use cnn::{conv1d_relu_maxpool, dropout_mask, CnnConfig, CnnModel};
pub use embedding::{embed, EmbeddingTable};
pub use gradcheck::{grad_check, TinyConfig};
pub use gru::GruModel;
pub use head::DenseHead;
pub use lstm::LstmModel;
pub use network::Gradients;
pub use rnn::RnnConfig;
pub use tensor::{cross_entropy, sigmoid, softmax, Tensor};
pub use train::{train_neural, EncodedData, NeuralParams, TrainedNeural};

use network::Network;

use crate::classical::argmax;
use crate::preprocess::IndexSequence;
use crate::{Error, Result, Rng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NeuralKind {
    Cnn,
    Lstm,
    Gru,
}

impl NeuralKind {
    pub const ALL: [NeuralKind; 3] = [NeuralKind::Cnn, NeuralKind::Lstm, NeuralKind::Gru];

    pub fn as_str(self) -> &'static str {
        match self {
            NeuralKind::Cnn => "cnn",
            NeuralKind::Lstm => "lstm",
            NeuralKind::Gru => "gru",
        }
    }
}

impl fmt::Display for NeuralKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NeuralKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cnn" => Ok(NeuralKind::Cnn),
            "lstm" => Ok(NeuralKind::Lstm),
            "gru" => Ok(NeuralKind::Gru),
            _ => Err(Error::InvalidArgument(format!("unknown neural model '{s}'"))),
        }
    }
}

/// A trained or freshly initialised neural classifier.
#[derive(Debug, Clone, PartialEq)]
pub enum NeuralModel {
    Cnn(CnnModel),
    Lstm(LstmModel),
    Gru(GruModel),
}

impl NeuralModel {
    fn net(&self) -> &dyn Network {
        match self {
            NeuralModel::Cnn(m) => m,
            NeuralModel::Lstm(m) => m,
            NeuralModel::Gru(m) => m,
        }
    }

    fn net_mut(&mut self) -> &mut dyn Network {
        match self {
            NeuralModel::Cnn(m) => m,
            NeuralModel::Lstm(m) => m,
            NeuralModel::Gru(m) => m,
        }
    }

    pub fn kind(&self) -> NeuralKind {
        match self {
            NeuralModel::Cnn(_) => NeuralKind::Cnn,
            NeuralModel::Lstm(_) => NeuralKind::Lstm,
            NeuralModel::Gru(_) => NeuralKind::Gru,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.net().n_classes()
    }

    pub fn embedding(&self) -> &EmbeddingTable {
        self.net().embedding()
    }

    /// Named parameter tensors other than the embedding, in a fixed order.
    pub fn parameters(&self) -> Vec<(&'static str, &Tensor)> {
        self.net().dense_params()
    }

    /// Inference-mode class probabilities (dropout off).
    pub fn predict_proba(&self, seq: &IndexSequence) -> Result<Vec<f64>> {
        Ok(softmax(&self.net().logits(seq, None)?))
    }

    pub fn predict(&self, seq: &IndexSequence) -> Result<usize> {
        Ok(argmax(&self.net().logits(seq, None)?))
    }

    /// Cross-entropy of one example under an optional dropout mask.
    pub fn loss(&self, seq: &IndexSequence, label: usize, noise: Option<&[f64]>) -> Result<f64> {
        network::check_label(label, self.n_classes())?;
        Ok(cross_entropy(&self.net().logits(seq, noise)?, label))
    }

    /// Loss and full gradient of one example under an optional dropout mask.
    pub fn loss_and_grad(&self, seq: &IndexSequence, label: usize, noise: Option<&[f64]>) -> Result<(f64, Gradients)> {
        let mut grads = self.zero_gradients();
        let loss = self.net().accumulate(seq, label, noise, &mut grads)?;
        Ok((loss, grads))
    }

    /// Training noise for one example (a CNN dropout mask), drawn from `rng`.
    pub fn sample_noise(&self, rng: &mut Rng) -> Option<Vec<f64>> {
        self.net().sample_noise(rng)
    }

    pub(crate) fn zero_gradients(&self) -> Gradients {
        Gradients::zeros_like(&self.net().dense_params())
    }

    pub(crate) fn accumulate(
        &self,
        seq: &IndexSequence,
        label: usize,
        noise: Option<&[f64]>,
        grads: &mut Gradients,
    ) -> Result<f64> {
        self.net().accumulate(seq, label, noise, grads)
    }

    /// Gradient step: every parameter moves by `-lr * grad`; PAD stays put.
    pub(crate) fn apply(&mut self, grads: &Gradients, lr: f64) {
        let net = self.net_mut();
        for (p, g) in net.dense_params_mut().into_iter().zip(&grads.dense) {
            p.add_scaled(g, -lr);
        }
        net.embedding_mut().apply(&grads.embedding, lr);
    }

    pub(crate) fn dense_params_mut(&mut self) -> Vec<&mut Tensor> {
        self.net_mut().dense_params_mut()
    }

    pub(crate) fn embedding_weights_mut(&mut self) -> &mut Tensor {
        self.net_mut().embedding_mut().weights_mut()
    }

    pub fn all_finite(&self) -> bool {
        self.embedding().weights().all_finite() && self.parameters().iter().all(|(_, t)| t.all_finite())
    }
}
