//! Bagged random forests with majority voting.

use rand::Rng as _;

use super::tree::{grow, Columns};
use super::{argmax, DecisionTree, Problem, TreeParams};
use crate::features::SparseVector;
use crate::{derived_rng, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Candidate features per node; `None` means `ceil(sqrt(n_features))`.
    pub features_per_split: Option<usize>,
    /// Train each tree on a bootstrap sample. Turning this off is only useful
    /// for debugging.
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, max_depth: None, min_samples_split: 2, features_per_split: None, bootstrap: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub trees: Vec<DecisionTree>,
    pub n_classes: usize,
    pub features_per_split: usize,
    pub seed: u64,
}

/// Tree `t` draws from its own stream `(seed, t)`: first `n` bootstrap
/// indices, then the per-node feature subsets.
pub fn train_forest(problem: &Problem<'_>, params: &ForestParams, seed: u64) -> Result<ForestModel> {
    if params.n_trees == 0 {
        return Err(Error::InvalidArgument("a forest needs at least one tree".into()));
    }
    let n_features = problem.n_features;
    let features_per_split = params
        .features_per_split
        .unwrap_or_else(|| (n_features as f64).sqrt().ceil() as usize)
        .clamp(1, n_features.max(1));
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_split: params.min_samples_split,
        max_features: Some(features_per_split),
    };
    let columns = Columns::new(problem);
    let n = problem.len();
    let trees = (0..params.n_trees)
        .map(|t| {
            let mut rng = derived_rng(seed, t as u64);
            let rows: Vec<usize> =
                if params.bootstrap { (0..n).map(|_| rng.random_range(0..n)).collect() } else { (0..n).collect() };
            grow(&columns, problem, rows, &tree_params, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ForestModel { trees, n_classes: problem.n_classes, features_per_split, seed })
}

impl ForestModel {
    pub fn votes(&self, x: &SparseVector) -> Vec<usize> {
        let mut votes = vec![0; self.n_classes];
        for t in &self.trees {
            votes[t.predict_one(x)] += 1;
        }
        votes
    }

    pub fn predict_one(&self, x: &SparseVector) -> usize {
        argmax(&self.votes(x).iter().map(|&v| v as f64).collect::<Vec<_>>())
    }
}

/// Majority vote over trees, ties to the lowest class index.
pub fn predict_forest(model: &ForestModel, x: &[SparseVector]) -> Vec<usize> {
    x.iter().map(|r| model.predict_one(r)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::Node;

    fn stump(class: usize) -> DecisionTree {
        let mut counts = vec![0, 0];
        counts[class] = 1;
        DecisionTree { nodes: vec![Node::Leaf { counts }], n_classes: 2, n_features: 1 }
    }

    #[test]
    fn vote_ties_go_low() {
        let f = ForestModel { trees: vec![stump(1), stump(0)], n_classes: 2, features_per_split: 1, seed: 0 };
        let x = Problem::dense_rows(&[vec![1.0]]);
        assert_eq!(predict_forest(&f, &x), vec![0]);
        let g = ForestModel { trees: vec![stump(1), stump(1), stump(0)], ..f };
        assert_eq!(predict_forest(&g, &x), vec![1]);
    }

    #[test]
    fn zero_trees_rejected() {
        let x = Problem::dense_rows(&[vec![1.0], vec![2.0]]);
        let y = vec![0, 1];
        let p = Problem::new(&x, &y, 1, 2).unwrap();
        assert!(train_forest(&p, &ForestParams { n_trees: 0, ..Default::default() }, 0).is_err());
    }
}
