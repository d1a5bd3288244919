use super::embedding::EmbeddingTable;
use super::head::{add, DenseHead};
use super::network::{check_label, logit_gradient, Gradients, Network};
use super::rnn::{concat, inputs, RnnConfig};
use super::tensor::{affine, cross_entropy, matvec_t_acc, outer_acc, sigmoid, softmax, Tensor};
use crate::preprocess::IndexSequence;
use crate::{Result, Rng};

/// Single-layer GRU whose final state feeds a linear+ReLU+linear head.
#[derive(Debug, Clone, PartialEq)]
pub struct GruModel {
    config: RnnConfig,
    embedding: EmbeddingTable,
    /// Update gate, reset gate and candidate weights, each `[H × (E+H)]`.
    pub(crate) w: [Tensor; 3],
    pub(crate) b: [Tensor; 3],
    pub(crate) head: DenseHead,
}

const Z: usize = 0;
const R: usize = 1;
const N: usize = 2;
const NAMES: [&str; 10] =
    ["gru.w_z", "gru.w_r", "gru.w_n", "gru.b_z", "gru.b_r", "gru.b_n", "head.w1", "head.b1", "head.w2", "head.b2"];

struct Step {
    zin: Vec<f64>,
    nin: Vec<f64>,
    h_prev: Vec<f64>,
    z: Vec<f64>,
    r: Vec<f64>,
    n: Vec<f64>,
}

impl GruModel {
    pub fn new(config: RnnConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let (e, h) = (config.embed_dim, config.hidden_size);
        let embedding = EmbeddingTable::new(config.vocab_rows, e, rng);
        let w = std::array::from_fn(|_| Tensor::glorot(&[h, e + h], e + h, h, rng));
        let b = std::array::from_fn(|_| Tensor::zeros(&[h]));
        let head = DenseHead::new(h, config.head_size, config.n_classes, rng);
        Ok(GruModel { config, embedding, w, b, head })
    }

    pub fn from_parts(config: RnnConfig, embedding: Tensor, dense: Vec<Tensor>) -> Result<Self> {
        config.validate()?;
        let (e, h, d, c) = (config.embed_dim, config.hidden_size, config.head_size, config.n_classes);
        let mut expected = vec![vec![h, e + h]; 3];
        expected.extend(vec![vec![h]; 3]);
        expected.extend([vec![d, h], vec![d], vec![c, d], vec![c]]);
        config.check_shapes(&dense, &expected)?;
        let embedding = EmbeddingTable::from_tensor(embedding)?;
        config.check_embedding(&embedding)?;
        let mut it = dense.into_iter();
        let w = std::array::from_fn(|_| it.next().unwrap());
        let b = std::array::from_fn(|_| it.next().unwrap());
        let head = DenseHead {
            w1: it.next().unwrap(),
            b1: it.next().unwrap(),
            w2: it.next().unwrap(),
            b2: it.next().unwrap(),
        };
        Ok(GruModel { config, embedding, w, b, head })
    }

    pub fn config(&self) -> &RnnConfig {
        &self.config
    }

    pub fn embedding(&self) -> &EmbeddingTable {
        &self.embedding
    }

    pub fn parameters(&self) -> Vec<(&'static str, &Tensor)> {
        self.dense_params()
    }

    /// Mutable `(W_z, W_r, W_n)` and biases, for hand-set experiments.
    pub fn gates_mut(&mut self) -> (&mut [Tensor; 3], &mut [Tensor; 3]) {
        (&mut self.w, &mut self.b)
    }

    pub fn head_mut(&mut self) -> &mut DenseHead {
        &mut self.head
    }

    pub fn embedding_mut(&mut self) -> &mut EmbeddingTable {
        &mut self.embedding
    }

    pub fn forward(&self, seq: &IndexSequence) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(seq, None)?))
    }

    /// Hidden state after every real position.
    pub fn states(&self, seq: &IndexSequence) -> Result<Vec<Vec<f64>>> {
        let (steps, h) = self.run(seq)?;
        let mut out: Vec<Vec<f64>> = steps.into_iter().skip(1).map(|s| s.h_prev).collect();
        if seq.true_length() > 0 {
            out.push(h);
        }
        Ok(out)
    }

    fn run(&self, seq: &IndexSequence) -> Result<(Vec<Step>, Vec<f64>)> {
        let hsize = self.config.hidden_size;
        let xs = inputs(&self.embedding, seq)?;
        let mut h = vec![0.0; hsize];
        let mut steps = Vec::with_capacity(xs.len());
        for x in xs {
            let zin = concat(x, &h);
            let z: Vec<f64> = affine(&self.w[Z], &self.b[Z], &zin).into_iter().map(sigmoid).collect();
            let r: Vec<f64> = affine(&self.w[R], &self.b[R], &zin).into_iter().map(sigmoid).collect();
            let rh: Vec<f64> = r.iter().zip(&h).map(|(a, b)| a * b).collect();
            let nin = concat(x, &rh);
            let n: Vec<f64> = affine(&self.w[N], &self.b[N], &nin).into_iter().map(f64::tanh).collect();
            let h_next = (0..hsize).map(|j| (1.0 - z[j]) * h[j] + z[j] * n[j]).collect();
            steps.push(Step { zin, nin, h_prev: h, z, r, n });
            h = h_next;
        }
        Ok((steps, h))
    }
}

impl Network for GruModel {
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
        let tensors = self.w.iter().chain(&self.b).chain([&self.head.w1, &self.head.b1, &self.head.w2, &self.head.b2]);
        NAMES.iter().copied().zip(tensors).collect()
    }

    fn dense_params_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = self.w.iter_mut().chain(self.b.iter_mut()).collect();
        out.extend(self.head.params_mut());
        out
    }

    fn logits(&self, seq: &IndexSequence, _noise: Option<&[f64]>) -> Result<Vec<f64>> {
        let (_, h) = self.run(seq)?;
        Ok(self.head.forward(&h).0)
    }

    fn accumulate(
        &self,
        seq: &IndexSequence,
        label: usize,
        _noise: Option<&[f64]>,
        grads: &mut Gradients,
    ) -> Result<f64> {
        check_label(label, self.config.n_classes)?;
        let (steps, h) = self.run(seq)?;
        let (logits, cache) = self.head.forward(&h);
        let loss = cross_entropy(&logits, label);
        let dlogits = logit_gradient(&logits, label);
        let mut dh = self.head.backward(&h, &cache, &dlogits, &mut grads.dense[6..]);

        let (e, hsize) = (self.config.embed_dim, self.config.hidden_size);
        let tokens = seq.tokens();
        for (t, s) in steps.iter().enumerate().rev() {
            let mut dh_prev: Vec<f64> = (0..hsize).map(|j| dh[j] * (1.0 - s.z[j])).collect();
            let da_n: Vec<f64> = (0..hsize).map(|j| dh[j] * s.z[j] * (1.0 - s.n[j] * s.n[j])).collect();
            let da_z: Vec<f64> = (0..hsize).map(|j| dh[j] * (s.n[j] - s.h_prev[j]) * s.z[j] * (1.0 - s.z[j])).collect();

            outer_acc(&mut grads.dense[N], &da_n, &s.nin);
            add(&mut grads.dense[3 + N], &da_n);
            let mut dnin = vec![0.0; e + hsize];
            matvec_t_acc(&self.w[N], &da_n, &mut dnin);
            let drh = &dnin[e..];
            let da_r: Vec<f64> = (0..hsize).map(|j| drh[j] * s.h_prev[j] * s.r[j] * (1.0 - s.r[j])).collect();
            for j in 0..hsize {
                dh_prev[j] += drh[j] * s.r[j];
            }

            let mut dzin = vec![0.0; e + hsize];
            for (gate, da) in [(Z, &da_z), (R, &da_r)] {
                outer_acc(&mut grads.dense[gate], da, &s.zin);
                add(&mut grads.dense[3 + gate], da);
                matvec_t_acc(&self.w[gate], da, &mut dzin);
            }
            let dx: Vec<f64> = (0..e).map(|k| dnin[k] + dzin[k]).collect();
            grads.add_embedding_row(tokens[t], &dx);
            for j in 0..hsize {
                dh_prev[j] += dzin[e + j];
            }
            dh = dh_prev;
        }
        Ok(loss)
    }
}
