use std::cell::RefCell;
use std::rc::Rc;

use offenseval::corpus::*;
use offenseval::evaluation::*;
use offenseval::pipeline::{fit_pipeline, ModelKind, RunConfig};
use offenseval::{Error, Result};
use Label::{Not, Off};

type BoxedTrainer = Box<dyn Fn(&Dataset) -> Result<Box<dyn Predictor>>>;

struct Constant(Label);

impl Predictor for Constant {
    fn predict(&self, ds: &Dataset) -> Result<Vec<Label>> {
        Ok(vec![self.0; ds.len()])
    }
}

fn majority(train: &Dataset) -> Result<Box<dyn Predictor>> {
    let counts = train.class_counts()?;
    let best = (0..counts.len()).rev().max_by_key(|&i| counts[i]).unwrap();
    Ok(Box::new(Constant(train.task().classes()[best])))
}

fn imbalanced() -> Dataset {
    let examples = (0..20)
        .map(|i| Example::for_task(format!("{i}"), format!("tweet {i}"), if i % 4 == 0 { Off } else { Not }).unwrap())
        .collect();
    Dataset::new(Task::A, examples).unwrap()
}

#[test]
fn metric_fixtures() {
    let c = confusion(&[Off, Not, Off, Not], &[Off, Off, Off, Not], Task::A.classes()).unwrap();
    assert!((macro_f1(&c) - 0.733333333333333).abs() < 1e-12);
    let perfect = confusion(&[Off, Not, Not], &[Off, Not, Not], Task::A.classes()).unwrap();
    assert_eq!(perfect.macro_f1(), 1.0);
    let wrong = confusion(&[Off, Not, Not], &[Not, Off, Off], Task::A.classes()).unwrap();
    assert_eq!(wrong.macro_f1(), 0.0);
    assert_eq!(accuracy(&[Off, Not], &[Off, Off]).unwrap(), 0.5);
}

#[test]
fn cv_of_majority_trainer_is_three_sevenths() {
    let report = cross_validate(&majority, &imbalanced(), 5, 0).unwrap();
    assert_eq!(report.per_fold.len(), 5);
    for fold in &report.per_fold {
        assert_eq!(fold.n, 4);
        assert!((fold.macro_f1 - 3.0 / 7.0).abs() < 1e-12);
    }
    let mean = report.per_fold.iter().map(|r| r.macro_f1).sum::<f64>() / 5.0;
    assert!((report.mean_macro_f1 - mean).abs() < 1e-12);
}

#[test]
fn grid_prefers_majority_and_first_duplicate() {
    #[derive(Clone, Debug, PartialEq)]
    enum Cfg {
        AlwaysOff,
        Majority(u8),
    }
    impl std::fmt::Display for Cfg {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            write!(f, "{self:?}")
        }
    }
    let factory = |c: &Cfg| -> Result<BoxedTrainer> {
        Ok(match c {
            Cfg::AlwaysOff => Box::new(|_: &Dataset| Ok(Box::new(Constant(Off)) as Box<dyn Predictor>)),
            Cfg::Majority(_) => Box::new(majority),
        })
    };
    let grid = [Cfg::AlwaysOff, Cfg::Majority(1), Cfg::Majority(2)];
    let result = grid_search(factory, &grid, &imbalanced(), 5, 3).unwrap();
    assert!((result.all[0].1 - 0.2).abs() < 1e-12);
    assert!((result.best_score - 3.0 / 7.0).abs() < 1e-12);
    assert_eq!(result.best_config, Cfg::Majority(1));
    assert_eq!(result.best_index, 1);
    assert_eq!(result.best_score, result.all.iter().map(|(_, s)| *s).fold(f64::MIN, f64::max));

    let single = grid_search(factory, &grid[..1], &imbalanced(), 5, 3).unwrap();
    assert_eq!(single.best_config, Cfg::AlwaysOff);
    assert!(grid_search(factory, &[], &imbalanced(), 5, 3).is_err());
}

#[test]
fn trainer_errors_name_the_fold_and_config() {
    let failing = |_: &Dataset| -> Result<Box<dyn Predictor>> { Err(Error::Training("boom".into())) };
    match cross_validate(&failing, &imbalanced(), 5, 0) {
        Err(Error::Fold { fold: 1, .. }) => {}
        other => panic!("{:?}", other.map(|r| r.mean_macro_f1)),
    }
    let r = grid_search(|_: &&str| Ok(failing), &["x"], &imbalanced(), 5, 0);
    assert!(matches!(r, Err(Error::GridConfig { index: 0, .. })));
}

/// Records, per fold, whether the sentinel reached training and whether the
/// fitted features know it.
struct Spy {
    config: RunConfig,
    sentinel: String,
    log: Rc<RefCell<Vec<(bool, bool)>>>,
}

impl Trainer for Spy {
    fn fit(&self, train: &Dataset) -> Result<Box<dyn Predictor>> {
        let in_train = train.iter().any(|e| e.raw_text().contains(&self.sentinel));
        let (pipeline, _) = fit_pipeline(&self.config, train)?;
        let word = self.config.preprocessor().tokens(&self.sentinel).remove(0);
        self.log.borrow_mut().push((in_train, pipeline.featurizer().knows(&word)));
        Ok(Box::new(pipeline))
    }
}

fn sentinel_run(config: RunConfig, ds: &Dataset) {
    let log = Rc::new(RefCell::new(Vec::new()));
    let spy = Spy { config, sentinel: "zyxwvut".into(), log: log.clone() };
    cross_validate(&spy, ds, 5, 11).unwrap();
    let log = log.borrow();
    assert_eq!(log.len(), 5);
    assert_eq!(log.iter().filter(|(in_train, _)| !in_train).count(), 1);
    for &(in_train, known) in log.iter() {
        assert_eq!(in_train, known);
    }
}

fn with_sentinel(ds: Dataset, at: usize) -> Dataset {
    let examples = ds
        .examples()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let text = if i == at { format!("{} zyxwvut", e.raw_text()) } else { e.raw_text().to_string() };
            Example::for_task(e.id(), text, e.label(ds.task()).unwrap()).unwrap()
        })
        .collect();
    Dataset::new(ds.task(), examples).unwrap()
}

#[test]
fn sentinel_is_oov_in_its_validation_fold() {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 80, ..Default::default() }, 4).unwrap();
    for model in [ModelKind::LogReg, ModelKind::Lstm] {
        let config = RunConfig::new(Task::A, model).with("epochs", "1").unwrap();
        sentinel_run(config, &with_sentinel(ds.clone(), 7));
    }
}

#[test]
fn sentinel_stays_out_of_augmented_training() {
    let ds =
        synthetic_corpus(&SyntheticConfig { n_examples: 300, ..Default::default() }, 4).unwrap().restrict_to(Task::B);
    let minority = ds.iter().position(|e| e.label(Task::B) == Some(Label::Unt)).unwrap();
    let mut config = RunConfig::new(Task::B, ModelKind::Svm).with("epochs", "2").unwrap();
    config.augmentation.enabled = true;
    sentinel_run(config, &with_sentinel(ds, minority));
}
