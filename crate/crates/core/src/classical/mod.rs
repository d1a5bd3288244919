//! Classical classifiers over sparse TF-IDF rows.
//!
//! Labels are class indices `0..n_classes`; the caller owns the mapping to
//! task labels.

mod forest;
mod linear;
mod tree;

pub use forest::{predict_forest, train_forest, ForestModel, ForestParams};
pub use linear::{
    hinge_loss, logreg_gradient, logreg_objective, predict_linear, svm_objective, svm_subgradient, train_linear_svm,
    train_logreg, LinearKind, LinearModel, LogRegParams, SvmParams,
};
pub use tree::{entropy, information_gain, train_tree, DecisionTree, Node, TreeParams};

use crate::features::SparseVector;
use crate::{Error, Result};

/// A labeled training set with its declared dimensions.
#[derive(Debug, Clone, Copy)]
pub struct Problem<'a> {
    pub x: &'a [SparseVector],
    pub y: &'a [usize],
    pub n_features: usize,
    pub n_classes: usize,
}

impl<'a> Problem<'a> {
    /// Checks lengths, label range and feature columns. Does not require two
    /// classes; the trainers that need them check separately.
    pub fn new(x: &'a [SparseVector], y: &'a [usize], n_features: usize, n_classes: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidArgument(format!("{} rows but {} labels", x.len(), y.len())));
        }
        if x.is_empty() {
            return Err(Error::InvalidArgument("no training rows".into()));
        }
        if n_classes < 2 {
            return Err(Error::InvalidArgument("need at least two classes".into()));
        }
        if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
            return Err(Error::InvalidArgument(format!("label {bad} outside 0..{n_classes}")));
        }
        if let Some(row) = x.iter().position(|r| r.min_dim() > n_features) {
            return Err(Error::InvalidArgument(format!(
                "row {row} has a column beyond the {n_features} declared features"
            )));
        }
        Ok(Problem { x, y, n_features, n_classes })
    }

    /// Build a problem from dense rows, mostly for small experiments and tests.
    pub fn dense_rows(rows: &[Vec<f64>]) -> Vec<SparseVector> {
        rows.iter().map(|r| SparseVector::from_dense(r)).collect()
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn require_two_classes(&self) -> Result<()> {
        let first = self.y[0];
        if self.y.iter().all(|&c| c == first) {
            return Err(Error::InvalidArgument("training labels contain a single class".into()));
        }
        if self.len() < 2 {
            return Err(Error::InvalidArgument("need at least two training rows".into()));
        }
        Ok(())
    }
}

/// Index of the largest score; the lowest index wins ties.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
