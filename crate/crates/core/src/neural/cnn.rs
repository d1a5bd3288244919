use rand::Rng as _;

use super::embedding::EmbeddingTable;
use super::head::add;
use super::network::{check_label, logit_gradient, Gradients, Network};
use super::tensor::{affine, cross_entropy, dot, matvec_t_acc, outer_acc, softmax, Tensor};
use crate::preprocess::IndexSequence;
use crate::{Error, Result, Rng};

#[derive(Debug, Clone, PartialEq)]
pub struct CnnConfig {
    pub vocab_rows: usize,
    pub embed_dim: usize,
    pub n_filters: usize,
    pub kernel_sizes: Vec<usize>,
    pub dropout: f64,
    pub n_classes: usize,
}

impl CnnConfig {
    pub fn validate(&self) -> Result<()> {
        if self.vocab_rows < 2 || self.embed_dim == 0 || self.n_filters == 0 {
            return Err(Error::InvalidArgument(
                "cnn needs vocab_rows >= 2 and positive embed_dim and n_filters".into(),
            ));
        }
        if self.kernel_sizes.is_empty() || self.kernel_sizes.contains(&0) {
            return Err(Error::InvalidArgument("kernel sizes must be non-empty and positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::InvalidArgument(format!("dropout must lie in [0, 1), got {}", self.dropout)));
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidArgument("need at least 2 classes".into()));
        }
        Ok(())
    }

    pub fn max_kernel(&self) -> usize {
        self.kernel_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn total_filters(&self) -> usize {
        self.n_filters * self.kernel_sizes.len()
    }
}

/// Embedding, one convolution bank per kernel size with ReLU and
/// max-over-time pooling, inverted dropout and a linear output layer.
#[derive(Debug, Clone, PartialEq)]
pub struct CnnModel {
    config: CnnConfig,
    embedding: EmbeddingTable,
    /// One `[n_filters × k × E]` tensor per kernel size.
    filters: Vec<Tensor>,
    biases: Vec<Tensor>,
    out_w: Tensor,
    out_b: Tensor,
}

struct Bank {
    /// Pre-activation maximum per filter.
    max_pre: Vec<f64>,
    argmax: Vec<usize>,
}

/// Max-over-time of the raw convolution. Rows from `active` on are known to
/// be zero, so windows there reduce to the bias.
fn conv_bank(x: &[f64], len: usize, active: usize, dim: usize, filters: &Tensor, bias: &Tensor) -> Bank {
    let n_filters = filters.shape()[0];
    let k = filters.shape()[1];
    let width = k * dim;
    let mut max_pre = vec![f64::NEG_INFINITY; n_filters];
    let mut argmax = vec![0; n_filters];
    for j in 0..=len - k {
        let end = (j + k).min(active.max(j));
        let span = (end - j) * dim;
        let window = &x[j * dim..j * dim + span];
        for f in 0..n_filters {
            let w = &filters.data()[f * width..f * width + span];
            let v = bias.data()[f] + dot(w, window);
            if v > max_pre[f] {
                max_pre[f] = v;
                argmax[f] = j;
            }
        }
    }
    Bank { max_pre, argmax }
}

fn check_bank(filters: &Tensor, bias: &Tensor, dim: usize) -> Result<usize> {
    let s = filters.shape();
    if s.len() != 3 || s[2] != dim || s[1] == 0 || bias.len() != s[0] {
        return Err(Error::InvalidArgument(format!(
            "filter bank {s:?} with {} biases does not fit embedding dim {dim}",
            bias.len()
        )));
    }
    Ok(s[1])
}

/// Convolve `x` (`[L × E]`) with each `[F × k × E]` filter bank, apply ReLU and
/// take the per-filter maximum over positions. Banks are concatenated.
pub fn conv1d_relu_maxpool(x: &Tensor, filters: &[Tensor], biases: &[Tensor]) -> Result<Tensor> {
    if x.shape().len() != 2 || filters.len() != biases.len() {
        return Err(Error::InvalidArgument("expected an [L × E] input and one bias per bank".into()));
    }
    let (len, dim) = (x.shape()[0], x.shape()[1]);
    let mut out = Vec::new();
    for (w, b) in filters.iter().zip(biases) {
        let k = check_bank(w, b, dim)?;
        if len < k {
            return Err(Error::InvalidArgument(format!("input length {len} shorter than kernel size {k}")));
        }
        let bank = conv_bank(x.data(), len, len, dim, w, b);
        out.extend(bank.max_pre.iter().map(|&v| v.max(0.0)));
    }
    let n = out.len();
    Tensor::from_vec(&[n], out)
}

/// Inverted dropout mask: each entry is 0 with probability `p`, else `1/(1-p)`.
pub fn dropout_mask(n: usize, p: f64, rng: &mut Rng) -> Vec<f64> {
    if p <= 0.0 {
        return vec![1.0; n];
    }
    let keep = 1.0 / (1.0 - p);
    (0..n).map(|_| if rng.random::<f64>() < p { 0.0 } else { keep }).collect()
}

impl CnnModel {
    pub fn new(config: CnnConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let e = config.embed_dim;
        let embedding = EmbeddingTable::new(config.vocab_rows, e, rng);
        let mut filters = Vec::new();
        let mut biases = Vec::new();
        for &k in &config.kernel_sizes {
            filters.push(Tensor::glorot(&[config.n_filters, k, e], k * e, config.n_filters, rng));
            biases.push(Tensor::zeros(&[config.n_filters]));
        }
        let total = config.total_filters();
        let out_w = Tensor::glorot(&[config.n_classes, total], total, config.n_classes, rng);
        let out_b = Tensor::zeros(&[config.n_classes]);
        Ok(CnnModel { config, embedding, filters, biases, out_w, out_b })
    }

    /// Rebuild from stored parameters, laid out as [`CnnModel::parameters`] returns them.
    pub fn from_parts(config: CnnConfig, embedding: Tensor, dense: Vec<Tensor>) -> Result<Self> {
        config.validate()?;
        let embedding = EmbeddingTable::from_tensor(embedding)?;
        let nk = config.kernel_sizes.len();
        if dense.len() != 2 * nk + 2 {
            return Err(Error::Format(format!("cnn expects {} tensors, got {}", 2 * nk + 2, dense.len())));
        }
        let mut it = dense.into_iter();
        let mut filters = Vec::new();
        let mut biases = Vec::new();
        for &k in &config.kernel_sizes {
            let w = it.next().unwrap();
            let b = it.next().unwrap();
            if w.shape() != [config.n_filters, k, config.embed_dim] || b.shape() != [config.n_filters] {
                return Err(Error::Format(format!("filter bank for k={k} has shape {:?}", w.shape())));
            }
            filters.push(w);
            biases.push(b);
        }
        let out_w = it.next().unwrap();
        let out_b = it.next().unwrap();
        if out_w.shape() != [config.n_classes, config.total_filters()] || out_b.shape() != [config.n_classes] {
            return Err(Error::Format("cnn output layer has the wrong shape".into()));
        }
        let model = CnnModel { config, embedding, filters, biases, out_w, out_b };
        if model.embedding.dim() != model.config.embed_dim || model.embedding.rows() != model.config.vocab_rows {
            return Err(Error::Format("cnn embedding has the wrong shape".into()));
        }
        Ok(model)
    }

    pub fn config(&self) -> &CnnConfig {
        &self.config
    }

    pub fn embedding(&self) -> &EmbeddingTable {
        &self.embedding
    }

    pub fn filters(&self) -> &[Tensor] {
        &self.filters
    }

    pub fn biases(&self) -> &[Tensor] {
        &self.biases
    }

    pub fn parameters(&self) -> Vec<(&'static str, &Tensor)> {
        self.dense_params()
    }

    /// Class probabilities. In train mode a fresh dropout mask is drawn from `rng`.
    pub fn forward(&self, seq: &IndexSequence, train_mode: bool, rng: &mut Rng) -> Result<Vec<f64>> {
        let mask = if train_mode { self.sample_noise(rng) } else { None };
        Ok(softmax(&self.logits(seq, mask.as_deref())?))
    }

    fn pooled(&self, seq: &IndexSequence) -> Result<(Tensor, Vec<Bank>)> {
        let len = seq.len();
        if len < self.config.max_kernel() {
            return Err(Error::InvalidArgument(format!(
                "sequence length {len} shorter than kernel size {}",
                self.config.max_kernel()
            )));
        }
        let x = self.embedding.lookup(seq)?;
        let banks = self
            .filters
            .iter()
            .zip(&self.biases)
            .map(|(w, b)| conv_bank(x.data(), len, seq.true_length(), self.config.embed_dim, w, b))
            .collect();
        Ok((x, banks))
    }

    fn features(&self, banks: &[Bank], noise: Option<&[f64]>) -> Vec<f64> {
        let mut h: Vec<f64> = banks.iter().flat_map(|b| b.max_pre.iter().map(|&v| v.max(0.0))).collect();
        if let Some(mask) = noise {
            h.iter_mut().zip(mask).for_each(|(v, m)| *v *= m);
        }
        h
    }
}

impl Network for CnnModel {
    fn n_classes(&self) -> usize {
        self.config.n_classes
    }

    fn embedding(&self) -> &EmbeddingTable {
        &self.embedding
    }

    fn embedding_mut(&mut self) -> &mut EmbeddingTable {
        &mut self.embedding
    }

    fn dense_params(&self) -> Vec<(&'static str, &Tensor)> {
        let mut out = Vec::new();
        for (w, b) in self.filters.iter().zip(&self.biases) {
            out.push(("conv.w", w));
            out.push(("conv.b", b));
        }
        out.push(("out.w", &self.out_w));
        out.push(("out.b", &self.out_b));
        out
    }

    fn dense_params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = Vec::new();
        for (w, b) in self.filters.iter_mut().zip(self.biases.iter_mut()) {
            out.push(w);
            out.push(b);
        }
        out.push(&mut self.out_w);
        out.push(&mut self.out_b);
        out
    }

    fn sample_noise(&self, rng: &mut Rng) -> Option<Vec<f64>> {
        (self.config.dropout > 0.0).then(|| dropout_mask(self.config.total_filters(), self.config.dropout, rng))
    }

    fn logits(&self, seq: &IndexSequence, noise: Option<&[f64]>) -> Result<Vec<f64>> {
        let (_, banks) = self.pooled(seq)?;
        Ok(affine(&self.out_w, &self.out_b, &self.features(&banks, noise)))
    }

    fn accumulate(
        &self,
        seq: &IndexSequence,
        label: usize,
        noise: Option<&[f64]>,
        grads: &mut Gradients,
    ) -> Result<f64> {
        check_label(label, self.config.n_classes)?;
        let (x, banks) = self.pooled(seq)?;
        let h = self.features(&banks, noise);
        let logits = affine(&self.out_w, &self.out_b, &h);
        let loss = cross_entropy(&logits, label);
        let dlogits = logit_gradient(&logits, label);

        let nk = self.filters.len();
        outer_acc(&mut grads.dense[2 * nk], &dlogits, &h);
        add(&mut grads.dense[2 * nk + 1], &dlogits);
        let mut dh = vec![0.0; h.len()];
        matvec_t_acc(&self.out_w, &dlogits, &mut dh);
        if let Some(mask) = noise {
            dh.iter_mut().zip(mask).for_each(|(d, m)| *d *= m);
        }

        let dim = self.config.embed_dim;
        let mut dx = vec![0.0; x.len()];
        let mut offset = 0;
        for (bi, bank) in banks.iter().enumerate() {
            let w = &self.filters[bi];
            let k = w.shape()[1];
            let width = k * dim;
            for f in 0..bank.max_pre.len() {
                let g = dh[offset + f];
                if bank.max_pre[f] <= 0.0 || g == 0.0 {
                    continue;
                }
                let start = bank.argmax[f] * dim;
                let window = &x.data()[start..start + width];
                let wf = &w.data()[f * width..(f + 1) * width];
                let gw = &mut grads.dense[2 * bi].data_mut()[f * width..(f + 1) * width];
                for (d, &xv) in gw.iter_mut().zip(window) {
                    *d += g * xv;
                }
                grads.dense[2 * bi + 1].data_mut()[f] += g;
                for (d, &wv) in dx[start..start + width].iter_mut().zip(wf) {
                    *d += g * wv;
                }
            }
            offset += bank.max_pre.len();
        }
        for (t, &idx) in seq.indices().iter().enumerate().take(seq.true_length()) {
            grads.add_embedding_row(idx, &dx[t * dim..(t + 1) * dim]);
        }
        Ok(loss)
    }
}
