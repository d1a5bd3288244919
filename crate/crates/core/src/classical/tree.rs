//! Information-gain decision trees over sparse rows.

use rand::seq::index;

use super::{argmax, Problem};
use crate::features::SparseVector;
use crate::{Error, Result, Rng};

const GAIN_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    /// Candidate features drawn per node; `None` evaluates every feature.
    pub max_features: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { max_depth: None, min_samples_split: 2, max_features: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        counts: Vec<usize>,
    },
}

/// Node 0 is the root.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree {
    pub nodes: Vec<Node>,
    pub n_classes: usize,
    pub n_features: usize,
}

impl DecisionTree {
    pub fn predict_one(&self, x: &SparseVector) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Split { feature, threshold, left, right } => {
                    at = if x.get(*feature) <= *threshold { *left } else { *right };
                }
                Node::Leaf { counts } => {
                    return argmax(&counts.iter().map(|&c| c as f64).collect::<Vec<_>>());
                }
            }
        }
    }

    pub fn predict(&self, x: &[SparseVector]) -> Vec<usize> {
        x.iter().map(|r| self.predict_one(r)).collect()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(0usize, 0usize)];
        while let Some((at, d)) = stack.pop() {
            deepest = deepest.max(d);
            if let Node::Split { left, right, .. } = self.nodes[at] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        deepest
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf { .. })).count()
    }
}

/// Shannon entropy (natural log) of a class histogram.
pub fn entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Entropy reduction from splitting `parent` into `left` and `right`.
pub fn information_gain(parent: &[usize], left: &[usize], right: &[usize]) -> f64 {
    let n: usize = parent.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let nl: usize = left.iter().sum();
    let nr: usize = right.iter().sum();
    let n = n as f64;
    entropy(parent) - (nl as f64 / n) * entropy(left) - (nr as f64 / n) * entropy(right)
}

/// Column-major copy of the training rows.
pub(crate) struct Columns {
    cols: Vec<Vec<(usize, f64)>>,
    n_rows: usize,
}

impl Columns {
    pub(crate) fn new(problem: &Problem<'_>) -> Self {
        let mut cols = vec![Vec::new(); problem.n_features];
        for (r, x) in problem.x.iter().enumerate() {
            for &(c, v) in x.pairs() {
                cols[c].push((r, v));
            }
        }
        Columns { cols, n_rows: problem.len() }
    }
}

/// Greedy top-down tree on all rows of `problem`. Each node picks the
/// (feature, threshold) with maximum information gain, thresholds being
/// midpoints between consecutive distinct values among the node's rows
/// (absent entries count as 0.0). Ties go to the lowest feature, then the
/// lowest threshold. A node becomes a leaf when pure, at `max_depth`, below
/// `min_samples_split`, or when no feature takes two distinct values.
pub fn train_tree(problem: &Problem<'_>, params: &TreeParams, rng: &mut Rng) -> Result<DecisionTree> {
    let columns = Columns::new(problem);
    let rows: Vec<usize> = (0..problem.len()).collect();
    grow(&columns, problem, rows, params, rng)
}

/// Grow a tree on a multiset of row indices (bootstrap samples repeat rows).
pub(crate) fn grow(
    columns: &Columns,
    problem: &Problem<'_>,
    rows: Vec<usize>,
    params: &TreeParams,
    rng: &mut Rng,
) -> Result<DecisionTree> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("cannot grow a tree on zero rows".into()));
    }
    let k = problem.n_classes;
    let n_features = problem.n_features;
    let max_features = params.max_features.unwrap_or(n_features).clamp(1, n_features.max(1));
    let mut builder = Builder {
        columns,
        y: problem.y,
        n_classes: k,
        multiplicity: vec![0; columns.n_rows],
        value: vec![0.0; columns.n_rows],
    };

    let mut nodes: Vec<Node> = vec![Node::Leaf { counts: Vec::new() }];
    let mut pending = vec![(0usize, rows, 0usize)];
    while let Some((slot, rows, depth)) = pending.pop() {
        let mut counts = vec![0; k];
        for &r in &rows {
            counts[problem.y[r]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let capped = params.max_depth.is_some_and(|d| depth >= d);
        if pure || capped || rows.len() < params.min_samples_split.max(2) {
            nodes[slot] = Node::Leaf { counts };
            continue;
        }
        let candidates: Vec<usize> = if max_features >= n_features {
            (0..n_features).collect()
        } else {
            let mut picked = index::sample(rng, n_features, max_features).into_vec();
            picked.sort_unstable();
            picked
        };
        match builder.best_split(&rows, &counts, &candidates) {
            None => nodes[slot] = Node::Leaf { counts },
            Some((feature, threshold)) => {
                let (left_rows, right_rows) = builder.partition(&rows, feature, threshold);
                let left = nodes.len();
                let right = left + 1;
                nodes.push(Node::Leaf { counts: Vec::new() });
                nodes.push(Node::Leaf { counts: Vec::new() });
                nodes[slot] = Node::Split { feature, threshold, left, right };
                // Right pushed first so the left subtree is built first.
                pending.push((right, right_rows, depth + 1));
                pending.push((left, left_rows, depth + 1));
            }
        }
    }
    Ok(DecisionTree { nodes, n_classes: k, n_features })
}

struct Builder<'a> {
    columns: &'a Columns,
    y: &'a [usize],
    n_classes: usize,
    /// Scratch: how often each row occurs in the current node.
    multiplicity: Vec<u32>,
    /// Scratch: feature value per row during partitioning.
    value: Vec<f64>,
}

impl Builder<'_> {
    fn best_split(&mut self, rows: &[usize], counts: &[usize], candidates: &[usize]) -> Option<(usize, f64)> {
        for &r in rows {
            self.multiplicity[r] += 1;
        }
        let parent_entropy = entropy(counts);
        let n = rows.len() as f64;
        let k = self.n_classes;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut present: Vec<(f64, usize, u32)> = Vec::new();
        let mut left = vec![0usize; k];
        let mut zero_counts = vec![0usize; k];

        for &f in candidates {
            present.clear();
            for &(r, v) in &self.columns.cols[f] {
                let m = self.multiplicity[r];
                if m > 0 {
                    present.push((v, self.y[r], m));
                }
            }
            if present.is_empty() {
                continue;
            }
            zero_counts.copy_from_slice(counts);
            let mut n_present = 0usize;
            for &(_, c, m) in &present {
                zero_counts[c] -= m as usize;
                n_present += m as usize;
            }
            let n_zero = rows.len() - n_present;
            if n_zero > 0 {
                present.push((0.0, usize::MAX, 0));
            }
            present.sort_by(|a, b| a.0.total_cmp(&b.0));

            left.iter_mut().for_each(|c| *c = 0);
            let mut n_left = 0usize;
            let mut i = 0;
            while i < present.len() {
                let v = present[i].0;
                while i < present.len() && present[i].0 == v {
                    let (_, c, m) = present[i];
                    if c == usize::MAX {
                        for (l, z) in left.iter_mut().zip(&zero_counts) {
                            *l += z;
                        }
                        n_left += n_zero;
                    } else {
                        left[c] += m as usize;
                        n_left += m as usize;
                    }
                    i += 1;
                }
                if i == present.len() {
                    break;
                }
                let threshold = 0.5 * (v + present[i].0);
                let n_right = rows.len() - n_left;
                let right: Vec<usize> = counts.iter().zip(&left).map(|(t, l)| t - l).collect();
                let gain =
                    parent_entropy - (n_left as f64 / n) * entropy(&left) - (n_right as f64 / n) * entropy(&right);
                if best.is_none_or(|(g, _, _)| gain > g + GAIN_EPS) {
                    best = Some((gain, f, threshold));
                }
            }
        }

        for &r in rows {
            self.multiplicity[r] = 0;
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn partition(&mut self, rows: &[usize], feature: usize, threshold: f64) -> (Vec<usize>, Vec<usize>) {
        for &(r, v) in &self.columns.cols[feature] {
            self.value[r] = v;
        }
        let split = rows.iter().partition(|&&r| self.value[r] <= threshold);
        for &(r, _) in &self.columns.cols[feature] {
            self.value[r] = 0.0;
        }
        split
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeded_rng;

    #[test]
    fn entropy_identities() {
        assert_eq!(entropy(&[5, 0]), 0.0);
        assert!((entropy(&[2, 2]) - std::f64::consts::LN_2).abs() < 1e-15);
        let g = information_gain(&[2, 2], &[2, 0], &[0, 2]);
        assert!((g - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(information_gain(&[3, 1], &[3, 1], &[0, 0]), 0.0);
    }

    #[test]
    fn pure_node_is_a_leaf() {
        let x = Problem::dense_rows(&[vec![1.0], vec![2.0], vec![3.0]]);
        let y = vec![1, 1, 1];
        let p = Problem::new(&x, &y, 1, 2).unwrap();
        let t = train_tree(&p, &TreeParams::default(), &mut seeded_rng(0)).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(t.predict(&x), y);
    }

    #[test]
    fn threshold_is_midpoint() {
        let x = Problem::dense_rows(&[vec![1.0], vec![3.0], vec![5.0], vec![7.0]]);
        let y = vec![0, 0, 1, 1];
        let p = Problem::new(&x, &y, 1, 2).unwrap();
        let t = train_tree(&p, &TreeParams::default(), &mut seeded_rng(0)).unwrap();
        match &t.nodes[0] {
            Node::Split { feature, threshold, .. } => assert_eq!((*feature, *threshold), (0, 4.0)),
            other => panic!("expected a split, got {other:?}"),
        }
    }

    #[test]
    fn negative_values_and_implicit_zeros() {
        let x = Problem::dense_rows(&[vec![-1.0], vec![0.0], vec![0.0], vec![2.0]]);
        let y = vec![1, 0, 0, 1];
        let p = Problem::new(&x, &y, 1, 2).unwrap();
        let t = train_tree(&p, &TreeParams::default(), &mut seeded_rng(0)).unwrap();
        assert_eq!(t.predict(&x), y);
    }
}
