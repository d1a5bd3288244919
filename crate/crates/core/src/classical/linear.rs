//! Multinomial logistic regression and a primal linear SVM trained by
//! (sub)gradient descent on sparse rows.

use rand::seq::SliceRandom;

use super::{argmax, Problem};
use crate::features::SparseVector;
use crate::{seeded_rng, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearKind {
    LogReg,
    Svm,
}

/// Weights are row-major `[n_rows × n_features]`. Logistic regression keeps one
/// row per class; the SVM keeps one row for binary tasks (positive side =
/// class 1) and one one-vs-rest row per class otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub kind: LinearKind,
    pub n_classes: usize,
    pub n_features: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    /// `l2` for logistic regression, `c` for the SVM.
    pub regularization: f64,
    /// Training objective before the first epoch and after each epoch.
    pub loss_history: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogRegParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for LogRegParams {
    fn default() -> Self {
        LogRegParams { l2: 1e-4, learning_rate: 0.1, epochs: 50, batch_size: 32 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 1.0, learning_rate: 0.1, epochs: 50, batch_size: 32 }
    }
}

impl LinearModel {
    /// All-zero parameters of the right shape.
    pub fn zeros(kind: LinearKind, n_classes: usize, n_features: usize, regularization: f64) -> Self {
        let n_rows = match kind {
            LinearKind::Svm if n_classes == 2 => 1,
            _ => n_classes,
        };
        LinearModel {
            kind,
            n_classes,
            n_features,
            weights: vec![0.0; n_rows * n_features],
            bias: vec![0.0; n_rows],
            regularization,
            loss_history: Vec::new(),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.bias.len()
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.weights[r * self.n_features..(r + 1) * self.n_features]
    }

    fn row_scores(&self, x: &SparseVector) -> Vec<f64> {
        (0..self.n_rows()).map(|r| x.dot(self.row(r)) + self.bias[r]).collect()
    }

    /// One score per class; prediction is their argmax.
    pub fn class_scores(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.min_dim() > self.n_features {
            return Err(Error::InvalidArgument(format!(
                "feature column {} beyond the model's {} features",
                x.min_dim() - 1,
                self.n_features
            )));
        }
        let rows = self.row_scores(x);
        Ok(if rows.len() == 1 { vec![-rows[0], rows[0]] } else { rows })
    }

    pub fn predict_one(&self, x: &SparseVector) -> Result<usize> {
        Ok(argmax(&self.class_scores(x)?))
    }

    pub fn weight_norm(&self) -> f64 {
        self.weights.iter().map(|w| w * w).sum::<f64>().sqrt()
    }
}

/// Predict a class index for every row.
pub fn predict_linear(model: &LinearModel, x: &[SparseVector]) -> Result<Vec<usize>> {
    x.iter().map(|r| model.predict_one(r)).collect()
}

fn softmax_in_place(v: &mut [f64]) {
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for e in v.iter_mut() {
        *e = (*e - max).exp();
        sum += *e;
    }
    for e in v.iter_mut() {
        *e /= sum;
    }
}

/// Mean softmax cross-entropy plus `(l2 / 2) ‖W‖²`.
pub fn logreg_objective(model: &LinearModel, problem: &Problem<'_>) -> f64 {
    let mut total = 0.0;
    for (x, &y) in problem.x.iter().zip(problem.y) {
        let scores = model.row_scores(x);
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln() + max;
        total += log_sum - scores[y];
    }
    let norm2: f64 = model.weights.iter().map(|w| w * w).sum();
    total / problem.len() as f64 + 0.5 * model.regularization * norm2
}

/// Full-batch gradient of [`logreg_objective`]: `(dW, db)`.
pub fn logreg_gradient(model: &LinearModel, problem: &Problem<'_>) -> (Vec<f64>, Vec<f64>) {
    let d = model.n_features;
    let mut gw: Vec<f64> = model.weights.iter().map(|w| model.regularization * w).collect();
    let mut gb = vec![0.0; model.n_rows()];
    let inv_n = 1.0 / problem.len() as f64;
    for (x, &y) in problem.x.iter().zip(problem.y) {
        let mut p = model.row_scores(x);
        softmax_in_place(&mut p);
        p[y] -= 1.0;
        for (r, &delta) in p.iter().enumerate() {
            gb[r] += delta * inv_n;
            for &(c, v) in x.pairs() {
                gw[r * d + c] += delta * v * inv_n;
            }
        }
    }
    (gw, gb)
}

/// `max(0, 1 - y * score)` for `y` in {-1, +1}.
pub fn hinge_loss(y: f64, score: f64) -> f64 {
    (1.0 - y * score).max(0.0)
}

fn svm_sign(model: &LinearModel, row: usize, label: usize) -> f64 {
    let positive = if model.n_rows() == 1 { label == 1 } else { label == row };
    if positive {
        1.0
    } else {
        -1.0
    }
}

/// Sum over one-vs-rest rows of `½‖w‖² + c Σ hinge`.
pub fn svm_objective(model: &LinearModel, problem: &Problem<'_>) -> f64 {
    let c = model.regularization;
    (0..model.n_rows())
        .map(|r| {
            let w = model.row(r);
            let hinge: f64 = problem
                .x
                .iter()
                .zip(problem.y)
                .map(|(x, &y)| hinge_loss(svm_sign(model, r, y), x.dot(w) + model.bias[r]))
                .sum();
            0.5 * w.iter().map(|v| v * v).sum::<f64>() + c * hinge
        })
        .sum()
}

/// A subgradient of [`svm_objective`]; at a hinge kink the zero branch is taken.
pub fn svm_subgradient(model: &LinearModel, problem: &Problem<'_>) -> (Vec<f64>, Vec<f64>) {
    let d = model.n_features;
    let c = model.regularization;
    let mut gw = model.weights.clone();
    let mut gb = vec![0.0; model.n_rows()];
    for r in 0..model.n_rows() {
        for (x, &y) in problem.x.iter().zip(problem.y) {
            let s = svm_sign(model, r, y);
            if s * (x.dot(model.row(r)) + model.bias[r]) < 1.0 {
                gb[r] -= c * s;
                for &(col, v) in x.pairs() {
                    gw[r * d + col] -= c * s * v;
                }
            }
        }
    }
    (gw, gb)
}

/// Weights kept as `scale * v` so the L2 shrink of a step costs O(1) even for
/// very wide sparse feature spaces.
struct ScaledWeights {
    v: Vec<f64>,
    scale: f64,
}

impl ScaledWeights {
    fn new(len: usize) -> Self {
        ScaledWeights { v: vec![0.0; len], scale: 1.0 }
    }

    fn dot_row(&self, row: &[f64], x: &SparseVector) -> f64 {
        self.scale * x.dot(row)
    }

    /// `w <- (w - lr * g) / (1 + lr * l2)` where `g` is given sparsely by `add`.
    fn shrink(&mut self, factor: f64) {
        self.scale /= factor;
        if self.scale < 1e-9 {
            for e in &mut self.v {
                *e *= self.scale;
            }
            self.scale = 1.0;
        }
    }

    fn materialize(self) -> Vec<f64> {
        self.v.into_iter().map(|e| e * self.scale).collect()
    }
}

fn batches(rng: &mut crate::Rng, n: usize, batch_size: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    order.chunks(batch_size.max(1)).map(<[usize]>::to_vec).collect()
}

fn check_schedule(learning_rate: f64, epochs: usize, batch_size: usize) -> Result<()> {
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(Error::InvalidArgument(format!("learning rate must be positive, got {learning_rate}")));
    }
    if epochs == 0 || batch_size == 0 {
        return Err(Error::InvalidArgument("epochs and batch size must be positive".into()));
    }
    Ok(())
}

/// Softmax regression by mini-batch gradient descent. The learning rate
/// decays as `lr / √epoch`; the L2 term is applied as a proximal shrink
/// after each data step, which is stable for any `l2`.
pub fn train_logreg(problem: &Problem<'_>, params: &LogRegParams, seed: u64) -> Result<LinearModel> {
    problem.require_two_classes()?;
    check_schedule(params.learning_rate, params.epochs, params.batch_size)?;
    if !(params.l2 >= 0.0) {
        return Err(Error::InvalidArgument(format!("l2 must be non-negative, got {}", params.l2)));
    }
    let d = problem.n_features;
    let k = problem.n_classes;
    let mut model = LinearModel::zeros(LinearKind::LogReg, k, d, params.l2);
    let mut history = vec![logreg_objective(&model, problem)];
    let mut w = ScaledWeights::new(k * d);
    let mut rng = seeded_rng(seed);

    for epoch in 1..=params.epochs {
        let lr = params.learning_rate / (epoch as f64).sqrt();
        for batch in batches(&mut rng, problem.len(), params.batch_size) {
            let step = lr / batch.len() as f64;
            // Gradients are computed at the pre-step weights, then applied.
            let mut deltas = Vec::with_capacity(batch.len());
            for &i in &batch {
                let x = &problem.x[i];
                let mut p: Vec<f64> = (0..k).map(|r| w.dot_row(&w.v[r * d..(r + 1) * d], x) + model.bias[r]).collect();
                softmax_in_place(&mut p);
                p[problem.y[i]] -= 1.0;
                deltas.push(p);
            }
            for (&i, delta) in batch.iter().zip(&deltas) {
                for (r, &g) in delta.iter().enumerate() {
                    model.bias[r] -= step * g;
                    for &(c, v) in problem.x[i].pairs() {
                        w.v[r * d + c] -= step * g * v / w.scale;
                    }
                }
            }
            w.shrink(1.0 + lr * params.l2);
        }
        model.weights = w.v.iter().map(|e| e * w.scale).collect();
        let loss = logreg_objective(&model, problem);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(loss);
    }
    model.weights = w.materialize();
    model.loss_history = history;
    Ok(model)
}

/// Primal linear SVM by mini-batch subgradient descent, one-vs-rest beyond two
/// classes.
///
/// Each row minimizes `½‖w‖² + c Σ hinge`. Steps are taken on the equivalent
/// rescaled objective `(λ/2)‖w‖² + mean hinge` with `λ = 1 / (c n)`, which has
/// the same minimizer and keeps step sizes independent of `n`.
pub fn train_linear_svm(problem: &Problem<'_>, params: &SvmParams, seed: u64) -> Result<LinearModel> {
    problem.require_two_classes()?;
    check_schedule(params.learning_rate, params.epochs, params.batch_size)?;
    if !(params.c > 0.0 && params.c.is_finite()) {
        return Err(Error::InvalidArgument(format!("c must be positive, got {}", params.c)));
    }
    let d = problem.n_features;
    let mut model = LinearModel::zeros(LinearKind::Svm, problem.n_classes, d, params.c);
    let n_rows = model.n_rows();
    let lambda = 1.0 / (params.c * problem.len() as f64);
    let mut history = vec![svm_objective(&model, problem)];
    let mut rows: Vec<ScaledWeights> = (0..n_rows).map(|_| ScaledWeights::new(d)).collect();
    let mut rng = seeded_rng(seed);

    for epoch in 1..=params.epochs {
        let lr = params.learning_rate / (epoch as f64).sqrt();
        for batch in batches(&mut rng, problem.len(), params.batch_size) {
            let step = lr / batch.len() as f64;
            for (r, w) in rows.iter_mut().enumerate() {
                let active: Vec<(usize, f64)> = batch
                    .iter()
                    .filter_map(|&i| {
                        let s = svm_sign(&model, r, problem.y[i]);
                        let score = w.dot_row(&w.v, &problem.x[i]) + model.bias[r];
                        (s * score < 1.0).then_some((i, s))
                    })
                    .collect();
                for (i, s) in active {
                    model.bias[r] += step * s;
                    for &(c, v) in problem.x[i].pairs() {
                        w.v[c] += step * s * v / w.scale;
                    }
                }
                w.shrink(1.0 + lr * lambda);
            }
        }
        model.weights = rows.iter().flat_map(|w| w.v.iter().map(move |e| e * w.scale)).collect();
        let loss = svm_objective(&model, problem);
        if !loss.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(loss);
    }
    model.weights = rows.into_iter().flat_map(ScaledWeights::materialize).collect();
    model.loss_history = history;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clusters() -> (Vec<SparseVector>, Vec<usize>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..5 {
            let j = i as f64 * 0.3;
            rows.push(vec![5.0 + j, 5.0 - j]);
            y.push(0);
            rows.push(vec![-5.0 - j, -5.0 + j]);
            y.push(1);
        }
        (Problem::dense_rows(&rows), y)
    }

    #[test]
    fn zero_model_predicts_class_zero() {
        let m = LinearModel::zeros(LinearKind::LogReg, 3, 2, 0.0);
        let x = Problem::dense_rows(&[vec![1.0, 2.0], vec![-3.0, 0.5]]);
        assert_eq!(predict_linear(&m, &x).unwrap(), vec![0, 0]);
        let s = LinearModel::zeros(LinearKind::Svm, 2, 2, 1.0);
        assert_eq!(predict_linear(&s, &x).unwrap(), vec![0, 0]);
    }

    #[test]
    fn dimension_mismatch() {
        let m = LinearModel::zeros(LinearKind::LogReg, 2, 2, 0.0);
        let x = vec![SparseVector::new(vec![(5, 1.0)]).unwrap()];
        assert!(predict_linear(&m, &x).is_err());
    }

    #[test]
    fn hinge_on_boundary() {
        assert_eq!(hinge_loss(1.0, 0.0), 1.0);
        assert_eq!(hinge_loss(-1.0, 0.0), 1.0);
        assert_eq!(hinge_loss(1.0, 2.0), 0.0);
    }

    #[test]
    fn single_class_rejected() {
        let (x, _) = clusters();
        let y = vec![0; x.len()];
        let p = Problem::new(&x, &y, 2, 2).unwrap();
        assert!(train_logreg(&p, &LogRegParams::default(), 0).is_err());
        assert!(train_linear_svm(&p, &SvmParams::default(), 0).is_err());
    }

    #[test]
    fn logreg_loss_decreases() {
        let (x, y) = clusters();
        let p = Problem::new(&x, &y, 2, 2).unwrap();
        let m = train_logreg(&p, &LogRegParams::default(), 3).unwrap();
        assert_eq!(m.loss_history.len(), 51);
        assert!(m.loss_history.last().unwrap() < &m.loss_history[0]);
    }
}
