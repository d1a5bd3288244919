use super::tensor::{affine, matvec_t_acc, outer_acc, Tensor};
use crate::Rng;

/// Linear + ReLU + linear classification head on top of a recurrent state.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseHead {
    pub(crate) w1: Tensor,
    pub(crate) b1: Tensor,
    pub(crate) w2: Tensor,
    pub(crate) b2: Tensor,
}

pub(crate) struct HeadCache {
    pre: Vec<f64>,
    act: Vec<f64>,
}

impl DenseHead {
    pub fn new(input: usize, width: usize, n_classes: usize, rng: &mut Rng) -> Self {
        DenseHead {
            w1: Tensor::glorot(&[width, input], input, width, rng),
            b1: Tensor::zeros(&[width]),
            w2: Tensor::glorot(&[n_classes, width], width, n_classes, rng),
            b2: Tensor::zeros(&[n_classes]),
        }
    }

    pub fn from_parts(w1: Tensor, b1: Tensor, w2: Tensor, b2: Tensor) -> crate::Result<Self> {
        let (d, h, c) = (w1.rows(), w1.cols(), w2.rows());
        if w1.shape() != [d, h] || b1.shape() != [d] || w2.shape() != [c, d] || b2.shape() != [c] {
            return Err(crate::Error::InvalidArgument("inconsistent head shapes".into()));
        }
        Ok(DenseHead { w1, b1, w2, b2 })
    }

    pub fn width(&self) -> usize {
        self.w1.rows()
    }

    pub(crate) fn forward(&self, h: &[f64]) -> (Vec<f64>, HeadCache) {
        let pre = affine(&self.w1, &self.b1, h);
        let act: Vec<f64> = pre.iter().map(|&v| v.max(0.0)).collect();
        let logits = affine(&self.w2, &self.b2, &act);
        (logits, HeadCache { pre, act })
    }

    /// Accumulate parameter gradients into `grads` (w1, b1, w2, b2) and
    /// return the gradient with respect to the input state.
    pub(crate) fn backward(&self, h: &[f64], cache: &HeadCache, dlogits: &[f64], grads: &mut [Tensor]) -> Vec<f64> {
        outer_acc(&mut grads[2], dlogits, &cache.act);
        add(&mut grads[3], dlogits);
        let mut dact = vec![0.0; cache.act.len()];
        matvec_t_acc(&self.w2, dlogits, &mut dact);
        for (d, &p) in dact.iter_mut().zip(&cache.pre) {
            if p <= 0.0 {
                *d = 0.0;
            }
        }
        outer_acc(&mut grads[0], &dact, h);
        add(&mut grads[1], &dact);
        let mut dh = vec![0.0; h.len()];
        matvec_t_acc(&self.w1, &dact, &mut dh);
        dh
    }

    pub(crate) fn params_mut(&mut self) -> [&mut Tensor; 4] {
        [&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }
}

pub(crate) fn add(t: &mut Tensor, v: &[f64]) {
    for (a, b) in t.data_mut().iter_mut().zip(v) {
        *a += b;
    }
}
