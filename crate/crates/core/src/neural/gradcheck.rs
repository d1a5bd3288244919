use rand::Rng as _;

use super::{CnnConfig, CnnModel, GruModel, LstmModel, NeuralKind, NeuralModel, RnnConfig};
use crate::preprocess::{IndexSequence, PAD_INDEX};
use crate::{seeded_rng, Error, Result};

const STEP: f64 = 1e-5;
const FLOOR: f64 = 1e-8;

/// Shape of the tiny model and example used by [`grad_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct TinyConfig {
    pub vocab_rows: usize,
    pub embed_dim: usize,
    pub hidden_size: usize,
    pub head_size: usize,
    pub n_filters: usize,
    pub kernel_sizes: Vec<usize>,
    pub dropout: f64,
    pub n_classes: usize,
    pub seq_len: usize,
    pub true_length: usize,
    /// Parameters are redrawn uniformly from `(-scale, scale)`.
    pub scale: f64,
}

impl Default for TinyConfig {
    fn default() -> Self {
        TinyConfig {
            vocab_rows: 6,
            embed_dim: 3,
            hidden_size: 3,
            head_size: 4,
            n_filters: 2,
            kernel_sizes: vec![1, 2],
            dropout: 0.5,
            n_classes: 3,
            seq_len: 5,
            true_length: 4,
            scale: 1.2,
        }
    }
}

impl TinyConfig {
    fn validate(&self) -> Result<()> {
        if self.embed_dim > 4 || self.hidden_size > 4 || self.seq_len > 5 {
            return Err(Error::InvalidArgument("tiny config needs E <= 4, H <= 4 and L <= 5".into()));
        }
        if self.true_length == 0 || self.true_length > self.seq_len {
            return Err(Error::InvalidArgument("true length must lie in 1..=seq_len".into()));
        }
        Ok(())
    }
}

/// Largest relative error between analytic gradients and central finite
/// differences over every trainable parameter (the PAD row is frozen).
pub fn grad_check(kind: NeuralKind, config: &TinyConfig, seed: u64) -> Result<f64> {
    config.validate()?;
    let mut rng = seeded_rng(seed);
    let mut model = match kind {
        NeuralKind::Cnn => NeuralModel::Cnn(CnnModel::new(
            CnnConfig {
                vocab_rows: config.vocab_rows,
                embed_dim: config.embed_dim,
                n_filters: config.n_filters,
                kernel_sizes: config.kernel_sizes.clone(),
                dropout: config.dropout,
                n_classes: config.n_classes,
            },
            &mut rng,
        )?),
        NeuralKind::Lstm | NeuralKind::Gru => {
            let rc = RnnConfig {
                vocab_rows: config.vocab_rows,
                embed_dim: config.embed_dim,
                hidden_size: config.hidden_size,
                head_size: config.head_size,
                n_classes: config.n_classes,
            };
            if kind == NeuralKind::Lstm {
                NeuralModel::Lstm(LstmModel::new(rc, &mut rng)?)
            } else {
                NeuralModel::Gru(GruModel::new(rc, &mut rng)?)
            }
        }
    };
    for t in model.dense_params_mut() {
        t.data_mut().iter_mut().for_each(|v| *v = rng.random_range(-config.scale..config.scale));
    }
    let emb = model.embedding_weights_mut();
    let dim = emb.cols();
    emb.data_mut()[dim..].iter_mut().for_each(|v| *v = rng.random_range(-config.scale..config.scale));

    let mut indices: Vec<usize> = (0..config.true_length).map(|_| rng.random_range(1..config.vocab_rows)).collect();
    indices.resize(config.seq_len, PAD_INDEX);
    let seq = IndexSequence::new(indices, config.true_length)?;
    let label = rng.random_range(0..config.n_classes);
    let noise = model.sample_noise(&mut rng);
    let noise = noise.as_deref();

    let (_, grads) = model.loss_and_grad(&seq, label, noise)?;
    let mut worst: f64 = 0.0;
    let n_dense = grads.dense.len();
    for p in 0..n_dense {
        for e in 0..grads.dense[p].len() {
            let numeric = central_difference(&mut model, &seq, label, noise, |m| {
                &mut m.dense_params_mut().into_iter().nth(p).unwrap().data_mut()[e]
            })?;
            worst = worst.max(relative_error(grads.dense[p].data()[e], numeric));
        }
    }
    for row in 1..config.vocab_rows {
        for d in 0..dim {
            let analytic = grads.embedding.get(&row).map_or(0.0, |g| g[d]);
            let numeric = central_difference(&mut model, &seq, label, noise, |m| {
                &mut m.embedding_weights_mut().data_mut()[row * dim + d]
            })?;
            worst = worst.max(relative_error(analytic, numeric));
        }
    }
    Ok(worst)
}

fn central_difference(
    model: &mut NeuralModel,
    seq: &IndexSequence,
    label: usize,
    noise: Option<&[f64]>,
    slot: impl Fn(&mut NeuralModel) -> &mut f64,
) -> Result<f64> {
    let original = *slot(model);
    *slot(model) = original + STEP;
    let plus = model.loss(seq, label, noise)?;
    *slot(model) = original - STEP;
    let minus = model.loss(seq, label, noise)?;
    *slot(model) = original;
    Ok((plus - minus) / (2.0 * STEP))
}

fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(FLOOR)
}
