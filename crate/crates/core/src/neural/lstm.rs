use super::embedding::EmbeddingTable;
use super::head::{add, DenseHead};
use super::network::{check_label, logit_gradient, Gradients, Network};
use super::rnn::{concat, inputs, RnnConfig};
use super::tensor::{affine, cross_entropy, matvec_t_acc, outer_acc, sigmoid, softmax, Tensor};
use crate::preprocess::IndexSequence;
use crate::{Result, Rng};

/// Single-layer LSTM whose final state feeds a linear+ReLU+linear head.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmModel {
    config: RnnConfig,
    embedding: EmbeddingTable,
    /// Input, forget, candidate and output gates, each `[H × (E+H)]`.
    pub(crate) w: [Tensor; 4],
    pub(crate) b: [Tensor; 4],
    pub(crate) head: DenseHead,
}

const I: usize = 0;
const F: usize = 1;
const G: usize = 2;
const O: usize = 3;
const NAMES: [&str; 12] = [
    "lstm.w_i", "lstm.w_f", "lstm.w_g", "lstm.w_o", "lstm.b_i", "lstm.b_f", "lstm.b_g", "lstm.b_o", "head.w1",
    "head.b1", "head.w2", "head.b2",
];

struct Step {
    z: Vec<f64>,
    gates: [Vec<f64>; 4],
    c_prev: Vec<f64>,
    c: Vec<f64>,
    tanh_c: Vec<f64>,
    h: Vec<f64>,
}

impl LstmModel {
    pub fn new(config: RnnConfig, rng: &mut Rng) -> Result<Self> {
        config.validate()?;
        let (e, h) = (config.embed_dim, config.hidden_size);
        let embedding = EmbeddingTable::new(config.vocab_rows, e, rng);
        let w = std::array::from_fn(|_| Tensor::glorot(&[h, e + h], e + h, h, rng));
        let b = std::array::from_fn(|_| Tensor::zeros(&[h]));
        let head = DenseHead::new(h, config.head_size, config.n_classes, rng);
        Ok(LstmModel { config, embedding, w, b, head })
    }

    pub fn from_parts(config: RnnConfig, embedding: Tensor, dense: Vec<Tensor>) -> Result<Self> {
        config.validate()?;
        let (e, h, d, c) = (config.embed_dim, config.hidden_size, config.head_size, config.n_classes);
        let mut expected = vec![vec![h, e + h]; 4];
        expected.extend(vec![vec![h]; 4]);
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
        Ok(LstmModel { config, embedding, w, b, head })
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

    /// Mutable gate weights `(W_i, W_f, W_g, W_o)` and biases, for hand-set experiments.
    pub fn gates_mut(&mut self) -> (&mut [Tensor; 4], &mut [Tensor; 4]) {
        (&mut self.w, &mut self.b)
    }

    pub fn head_mut(&mut self) -> &mut DenseHead {
        &mut self.head
    }

    pub fn embedding_mut(&mut self) -> &mut EmbeddingTable {
        &mut self.embedding
    }

    /// Class probabilities from the state at the last non-pad position.
    pub fn forward(&self, seq: &IndexSequence) -> Result<Vec<f64>> {
        Ok(softmax(&self.logits(seq, None)?))
    }

    /// Hidden and cell state after every real position.
    pub fn states(&self, seq: &IndexSequence) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
        let (steps, _) = self.run(seq)?;
        Ok(steps.into_iter().map(|s| (s.h, s.c)).collect())
    }

    fn run(&self, seq: &IndexSequence) -> Result<(Vec<Step>, Vec<f64>)> {
        let hsize = self.config.hidden_size;
        let xs = inputs(&self.embedding, seq)?;
        let mut h = vec![0.0; hsize];
        let mut c = vec![0.0; hsize];
        let mut steps = Vec::with_capacity(xs.len());
        for x in xs {
            let z = concat(x, &h);
            let gates: [Vec<f64>; 4] = std::array::from_fn(|g| {
                let a = affine(&self.w[g], &self.b[g], &z);
                if g == G {
                    a.into_iter().map(f64::tanh).collect()
                } else {
                    a.into_iter().map(sigmoid).collect()
                }
            });
            let c_prev = c;
            c = (0..hsize).map(|j| gates[F][j] * c_prev[j] + gates[I][j] * gates[G][j]).collect();
            let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
            h = (0..hsize).map(|j| gates[O][j] * tanh_c[j]).collect();
            steps.push(Step { z, gates, c_prev, c: c.clone(), tanh_c, h: h.clone() });
        }
        Ok((steps, h))
    }
}

impl Network for LstmModel {
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
        let mut dh = self.head.backward(&h, &cache, &dlogits, &mut grads.dense[8..]);

        let (e, hsize) = (self.config.embed_dim, self.config.hidden_size);
        let mut dc = vec![0.0; hsize];
        let tokens = seq.tokens();
        for (t, s) in steps.iter().enumerate().rev() {
            let [i, f, g, o] = &s.gates;
            let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; hsize]);
            for j in 0..hsize {
                let tc = s.tanh_c[j];
                dc[j] += dh[j] * o[j] * (1.0 - tc * tc);
                da[O][j] = dh[j] * tc * o[j] * (1.0 - o[j]);
                da[I][j] = dc[j] * g[j] * i[j] * (1.0 - i[j]);
                da[G][j] = dc[j] * i[j] * (1.0 - g[j] * g[j]);
                da[F][j] = dc[j] * s.c_prev[j] * f[j] * (1.0 - f[j]);
                dc[j] *= f[j];
            }
            let mut dz = vec![0.0; e + hsize];
            for gate in 0..4 {
                outer_acc(&mut grads.dense[gate], &da[gate], &s.z);
                add(&mut grads.dense[4 + gate], &da[gate]);
                matvec_t_acc(&self.w[gate], &da[gate], &mut dz);
            }
            grads.add_embedding_row(tokens[t], &dz[..e]);
            dh = dz[e..].to_vec();
        }
        Ok(loss)
    }
}
