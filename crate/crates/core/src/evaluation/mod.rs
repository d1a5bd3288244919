//! Metrics, hold-out and k-fold protocols, and grid search.

use std::fmt;

use crate::corpus::{make_folds, split_holdout, Dataset, Label};
use crate::{Error, Result};

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl ClassCounts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// `2PR/(P+R)`, with every 0/0 taken as 0.
    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionCounts<L> {
    classes: Vec<L>,
    counts: Vec<ClassCounts>,
    total: usize,
    correct: usize,
}

impl<L> ConfusionCounts<L> {
    pub fn classes(&self) -> &[L] {
        &self.classes
    }

    pub fn counts(&self) -> &[ClassCounts] {
        &self.counts
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn per_class_f1(&self) -> Vec<f64> {
        self.counts.iter().map(ClassCounts::f1).collect()
    }

    pub fn macro_f1(&self) -> f64 {
        macro_f1(self)
    }

    pub fn accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }
}

/// Per-class one-vs-rest counts over the given class list.
pub fn confusion<L>(y_true: &[L], y_pred: &[L], classes: &[L]) -> Result<ConfusionCounts<L>>
where
    L: PartialEq + Clone + fmt::Debug,
{
    check_lengths(y_true.len(), y_pred.len())?;
    let position = |l: &L| {
        classes
            .iter()
            .position(|c| c == l)
            .ok_or_else(|| Error::Validation(format!("label {l:?} is not one of {classes:?}")))
    };
    let mut counts = vec![ClassCounts::default(); classes.len()];
    let mut correct = 0;
    for (t, p) in y_true.iter().zip(y_pred) {
        let (ti, pi) = (position(t)?, position(p)?);
        for (c, cc) in counts.iter_mut().enumerate() {
            match (c == ti, c == pi) {
                (true, true) => cc.tp += 1,
                (false, true) => cc.fp += 1,
                (true, false) => cc.fn_ += 1,
                (false, false) => cc.tn += 1,
            }
        }
        correct += usize::from(ti == pi);
    }
    Ok(ConfusionCounts { classes: classes.to_vec(), counts, total: y_true.len(), correct })
}

/// Unweighted mean of per-class F1 over every listed class.
pub fn macro_f1<L>(c: &ConfusionCounts<L>) -> f64 {
    if c.counts.is_empty() {
        return 0.0;
    }
    c.counts.iter().map(ClassCounts::f1).sum::<f64>() / c.counts.len() as f64
}

pub fn accuracy<L: PartialEq>(y_true: &[L], y_pred: &[L]) -> Result<f64> {
    check_lengths(y_true.len(), y_pred.len())?;
    let hits = y_true.iter().zip(y_pred).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / y_true.len() as f64)
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::InvalidArgument(format!("{a} true labels but {b} predictions")));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("no labels to evaluate".into()));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub macro_f1: f64,
    pub accuracy: f64,
    pub per_class_f1: Vec<(String, f64)>,
    pub n: usize,
}

impl EvalReport {
    pub fn from_confusion<L: fmt::Display>(c: &ConfusionCounts<L>) -> Self {
        EvalReport {
            macro_f1: c.macro_f1(),
            accuracy: c.accuracy(),
            per_class_f1: c.classes.iter().map(|l| l.to_string()).zip(c.per_class_f1()).collect(),
            n: c.total,
        }
    }

    /// `key = value` pairs, every key prefixed with `prefix`.
    pub fn key_values(&self, prefix: &str) -> Vec<(String, String)> {
        let mut kv = vec![
            (format!("{prefix}macro_f1"), self.macro_f1.to_string()),
            (format!("{prefix}accuracy"), self.accuracy.to_string()),
            (format!("{prefix}n"), self.n.to_string()),
        ];
        for (class, f1) in &self.per_class_f1 {
            kv.push((format!("{prefix}f1.{class}"), f1.to_string()));
        }
        kv
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "macro_f1={:.4} accuracy={:.4} n={}", self.macro_f1, self.accuracy, self.n)
    }
}

/// Metrics of `predicted` against the labels of `gold` over the task's classes.
pub fn evaluate_labels(gold: &Dataset, predicted: &[Label]) -> Result<EvalReport> {
    let truth = gold.labels()?;
    let c = confusion(&truth, predicted, gold.task().classes())?;
    Ok(EvalReport::from_confusion(&c))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub per_fold: Vec<EvalReport>,
    pub mean_macro_f1: f64,
    pub mean_accuracy: f64,
}

impl CvReport {
    pub fn from_folds(per_fold: Vec<EvalReport>) -> Self {
        let k = per_fold.len() as f64;
        let mean_macro_f1 = per_fold.iter().map(|r| r.macro_f1).sum::<f64>() / k;
        let mean_accuracy = per_fold.iter().map(|r| r.accuracy).sum::<f64>() / k;
        CvReport { per_fold, mean_macro_f1, mean_accuracy }
    }

    pub fn key_values(&self, prefix: &str) -> Vec<(String, String)> {
        let mut kv = vec![(format!("{prefix}k"), self.per_fold.len().to_string())];
        for (i, r) in self.per_fold.iter().enumerate() {
            kv.extend(r.key_values(&format!("{prefix}fold.{}.", i + 1)));
        }
        kv.push((format!("{prefix}mean.macro_f1"), self.mean_macro_f1.to_string()));
        kv.push((format!("{prefix}mean.accuracy"), self.mean_accuracy.to_string()));
        kv
    }
}

impl fmt::Display for CvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.per_fold.iter().enumerate() {
            writeln!(f, "fold {}: {r}", i + 1)?;
        }
        write!(f, "mean: macro_f1={:.4} accuracy={:.4}", self.mean_macro_f1, self.mean_accuracy)
    }
}

/// A fitted model that labels every example of a dataset.
pub trait Predictor {
    fn predict(&self, ds: &Dataset) -> Result<Vec<Label>>;
}

/// A self-contained training procedure: everything fitted from data
/// (vocabulary, feature weights, augmentation) is fitted inside `fit`.
pub trait Trainer {
    fn fit(&self, train: &Dataset) -> Result<Box<dyn Predictor>>;
}

impl<F> Trainer for F
where
    F: Fn(&Dataset) -> Result<Box<dyn Predictor>>,
{
    fn fit(&self, train: &Dataset) -> Result<Box<dyn Predictor>> {
        self(train)
    }
}

/// Validation examples exclude any synthetic (augmented) rows.
fn genuine(ds: &Dataset) -> Dataset {
    let keep: Vec<usize> = (0..ds.len()).filter(|&i| !ds.examples()[i].is_augmented()).collect();
    ds.subset(&keep)
}

fn evaluate_on(predictor: &dyn Predictor, valid: &Dataset) -> Result<EvalReport> {
    let predicted = predictor.predict(valid)?;
    evaluate_labels(valid, &predicted)
}

/// Stratified k-fold cross-validation with a fresh fit per fold.
pub fn cross_validate(trainer: &dyn Trainer, ds: &Dataset, k: usize, seed: u64) -> Result<CvReport> {
    let plan = make_folds(ds, k, seed)?;
    let mut per_fold = Vec::with_capacity(k);
    for fold in 0..k {
        let (train_idx, valid_idx) = plan.split(fold);
        let wrap = |source: Error| Error::Fold { fold: fold + 1, source: Box::new(source) };
        let train = ds.subset(&train_idx);
        let valid = genuine(&ds.subset(&valid_idx));
        let predictor = trainer.fit(&train).map_err(wrap)?;
        per_fold.push(evaluate_on(predictor.as_ref(), &valid).map_err(wrap)?);
    }
    Ok(CvReport::from_folds(per_fold))
}

/// Fit on a stratified `train_fraction` of `ds`, evaluate on the rest.
pub fn holdout_evaluate(trainer: &dyn Trainer, ds: &Dataset, train_fraction: f64, seed: u64) -> Result<EvalReport> {
    let (train, valid) = split_holdout(ds, train_fraction, seed)?;
    let predictor = trainer.fit(&train)?;
    evaluate_on(predictor.as_ref(), &genuine(&valid))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult<C> {
    pub best_index: usize,
    pub best_config: C,
    pub best_score: f64,
    /// Every config with its mean macro-F1, in grid order.
    pub all: Vec<(C, f64)>,
    pub reports: Vec<CvReport>,
}

/// Cross-validate every config on the same folds; the highest mean
/// macro-F1 wins and the earliest config wins ties.
pub fn grid_search<C, T, F>(factory: F, grid: &[C], ds: &Dataset, k: usize, seed: u64) -> Result<GridResult<C>>
where
    C: Clone + fmt::Display,
    T: Trainer,
    F: Fn(&C) -> Result<T>,
{
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    let mut all = Vec::with_capacity(grid.len());
    let mut reports = Vec::with_capacity(grid.len());
    let mut best = 0;
    for (index, config) in grid.iter().enumerate() {
        let wrap = |source: Error| Error::GridConfig { index, config: config.to_string(), source: Box::new(source) };
        let trainer = factory(config).map_err(wrap)?;
        let report = cross_validate(&trainer, ds, k, seed).map_err(wrap)?;
        if report.mean_macro_f1 > all.get(best).map_or(f64::NEG_INFINITY, |(_, s): &(C, f64)| *s) {
            best = index;
        }
        all.push((config.clone(), report.mean_macro_f1));
        reports.push(report);
    }
    Ok(GridResult { best_index: best, best_config: all[best].0.clone(), best_score: all[best].1, all, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Not, Off};

    #[test]
    fn hand_fixture() {
        let c = confusion(&[Off, Not, Off, Not], &[Off, Off, Off, Not], &[Off, Not]).unwrap();
        assert_eq!(c.counts()[0], ClassCounts { tp: 2, fp: 1, fn_: 0, tn: 1 });
        assert_eq!(c.counts()[1], ClassCounts { tp: 1, fp: 0, fn_: 1, tn: 2 });
        assert!((c.per_class_f1()[0] - 0.8).abs() < 1e-12);
        assert!((c.macro_f1() - 11.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn counts_sum_to_total() {
        let c = confusion(&[0, 1, 2, 2, 1], &[1, 1, 2, 0, 0], &[0, 1, 2]).unwrap();
        for cc in c.counts() {
            assert_eq!(cc.tp + cc.fp + cc.fn_ + cc.tn, 5);
        }
        assert!(confusion(&[0, 3], &[0, 1], &[0, 1]).is_err());
        assert!(confusion::<u8>(&[], &[], &[0]).is_err());
    }
}
