use rand::seq::SliceRandom;

use super::{CnnConfig, CnnModel, GruModel, LstmModel, NeuralKind, NeuralModel, RnnConfig};
use crate::preprocess::IndexSequence;
use crate::{seeded_rng, Error, Result};

/// Padded index sequences with their class indices.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedData {
    sequences: Vec<IndexSequence>,
    labels: Vec<usize>,
    n_classes: usize,
    vocab_rows: usize,
}

impl EncodedData {
    pub fn new(sequences: Vec<IndexSequence>, labels: Vec<usize>, n_classes: usize, vocab_rows: usize) -> Result<Self> {
        if sequences.len() != labels.len() {
            return Err(Error::InvalidArgument(format!("{} sequences but {} labels", sequences.len(), labels.len())));
        }
        if sequences.is_empty() {
            return Err(Error::InvalidArgument("no training sequences".into()));
        }
        if n_classes < 2 {
            return Err(Error::InvalidArgument("need at least 2 classes".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l >= n_classes) {
            return Err(Error::InvalidArgument(format!("label index {l} outside {n_classes} classes")));
        }
        if let Some(i) = sequences.iter().flat_map(|s| s.indices()).find(|&&i| i >= vocab_rows) {
            return Err(Error::InvalidArgument(format!("index {i} outside {vocab_rows} embedding rows")));
        }
        Ok(EncodedData { sequences, labels, n_classes, vocab_rows })
    }

    pub fn sequences(&self) -> &[IndexSequence] {
        &self.sequences
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn vocab_rows(&self) -> usize {
        self.vocab_rows
    }

    pub fn len(&self) -> usize {
        self.sequences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequences.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeuralParams {
    pub epochs: usize,
    pub batch_size: usize,
    /// Initial step size, applied to the gradient summed over a batch;
    /// epoch `e` (from 1) uses `learning_rate / sqrt(e)`.
    pub learning_rate: f64,
    pub dropout: f64,
    pub n_filters: usize,
    pub kernel_sizes: Vec<usize>,
    pub embed_dim: usize,
    pub hidden_size: usize,
    pub head_size: usize,
    /// Threshold on the global norm of the summed batch gradient.
    pub clip_norm: f64,
}

impl Default for NeuralParams {
    fn default() -> Self {
        NeuralParams {
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.05,
            dropout: 0.5,
            n_filters: 64,
            kernel_sizes: vec![2, 3, 4],
            embed_dim: 100,
            hidden_size: 32,
            head_size: 16,
            clip_norm: 5.0,
        }
    }
}

impl NeuralParams {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidArgument("epochs and batch_size must be positive".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {}", self.learning_rate)));
        }
        if !(self.clip_norm > 0.0) {
            return Err(Error::InvalidArgument("clip_norm must be positive".into()));
        }
        Ok(())
    }

    pub fn cnn_config(&self, vocab_rows: usize, n_classes: usize) -> CnnConfig {
        CnnConfig {
            vocab_rows,
            embed_dim: self.embed_dim,
            n_filters: self.n_filters,
            kernel_sizes: self.kernel_sizes.clone(),
            dropout: self.dropout,
            n_classes,
        }
    }

    pub fn rnn_config(&self, vocab_rows: usize, n_classes: usize) -> RnnConfig {
        RnnConfig {
            vocab_rows,
            embed_dim: self.embed_dim,
            hidden_size: self.hidden_size,
            head_size: self.head_size,
            n_classes,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedNeural {
    pub model: NeuralModel,
    /// Mean training loss of each epoch.
    pub loss_history: Vec<f64>,
}

/// Mini-batch SGD on cross-entropy with global-norm clipping. Each step
/// moves along the sum of the batch's per-example gradients.
pub fn train_neural(kind: NeuralKind, data: &EncodedData, params: &NeuralParams, seed: u64) -> Result<TrainedNeural> {
    params.validate()?;
    let mut rng = seeded_rng(seed);
    let (rows, classes) = (data.vocab_rows(), data.n_classes());
    let mut model = match kind {
        NeuralKind::Cnn => NeuralModel::Cnn(CnnModel::new(params.cnn_config(rows, classes), &mut rng)?),
        NeuralKind::Lstm => NeuralModel::Lstm(LstmModel::new(params.rnn_config(rows, classes), &mut rng)?),
        NeuralKind::Gru => NeuralModel::Gru(GruModel::new(params.rnn_config(rows, classes), &mut rng)?),
    };
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_history = Vec::with_capacity(params.epochs);
    for epoch in 1..=params.epochs {
        let lr = params.learning_rate / (epoch as f64).sqrt();
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for batch in order.chunks(params.batch_size) {
            let mut grads = model.zero_gradients();
            for &i in batch {
                let noise = model.sample_noise(&mut rng);
                total += model.accumulate(&data.sequences[i], data.labels[i], noise.as_deref(), &mut grads)?;
            }
            if !total.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            let norm = grads.norm();
            if !norm.is_finite() {
                return Err(Error::Diverged { epoch });
            }
            if norm > params.clip_norm {
                grads.scale(params.clip_norm / norm);
            }
            model.apply(&grads, lr);
        }
        let mean = total / data.len() as f64;
        if !mean.is_finite() || !model.all_finite() {
            return Err(Error::Diverged { epoch });
        }
        loss_history.push(mean);
    }
    Ok(TrainedNeural { model, loss_history })
}
