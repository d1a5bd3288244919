//! Run configuration and the end-to-end fitted pipeline:
//! preprocessing, feature extraction and one of six classifiers.

use std::fmt;
use std::str::FromStr;

use crate::classical::{
    predict_forest, predict_linear, train_forest, train_linear_svm, train_logreg, ForestModel, ForestParams,
    LinearModel, LogRegParams, Problem, SvmParams,
};
use crate::corpus::{augment_minority, Dataset, Label, Task};
use crate::evaluation::{Predictor, Trainer};
use crate::features::{encode_batch, TfidfModel};
use crate::neural::{train_neural, EncodedData, NeuralKind, NeuralModel, NeuralParams};
use crate::preprocess::{max_corpus_length, CleanOptions, Preprocessor, RootMode, Vocabulary};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Cnn,
    Lstm,
    Gru,
    LogReg,
    Svm,
    Forest,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] =
        [ModelKind::Cnn, ModelKind::Lstm, ModelKind::Gru, ModelKind::LogReg, ModelKind::Svm, ModelKind::Forest];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Cnn => "cnn",
            ModelKind::Lstm => "lstm",
            ModelKind::Gru => "gru",
            ModelKind::LogReg => "logreg",
            ModelKind::Svm => "svm",
            ModelKind::Forest => "forest",
        }
    }

    pub fn neural_kind(self) -> Option<NeuralKind> {
        match self {
            ModelKind::Cnn => Some(NeuralKind::Cnn),
            ModelKind::Lstm => Some(NeuralKind::Lstm),
            ModelKind::Gru => Some(NeuralKind::Gru),
            _ => None,
        }
    }

    /// Hyperparameter keys with their default values, in canonical order.
    pub fn defaults(self) -> &'static [(&'static str, &'static str)] {
        match self {
            ModelKind::Cnn => &[
                ("lr", "0.05"),
                ("dropout", "0.5"),
                ("n_filters", "64"),
                ("kernel_sizes", "2 3 4"),
                ("epochs", "20"),
                ("batch_size", "32"),
                ("embed_dim", "100"),
                ("clip_norm", "5"),
                ("max_len", "auto"),
            ],
            ModelKind::Lstm | ModelKind::Gru => &[
                ("lr", "0.05"),
                ("epochs", "20"),
                ("batch_size", "32"),
                ("embed_dim", "100"),
                ("hidden_size", "32"),
                ("head_size", "16"),
                ("clip_norm", "5"),
                ("max_len", "auto"),
            ],
            ModelKind::LogReg => &[("l2", "0.0001"), ("lr", "0.1"), ("epochs", "50"), ("batch_size", "32")],
            ModelKind::Svm => &[("c", "1"), ("lr", "0.1"), ("epochs", "50"), ("batch_size", "32")],
            ModelKind::Forest => &[
                ("n_trees", "100"),
                ("max_depth", "none"),
                ("min_samples_split", "2"),
                ("features_per_split", "auto"),
                ("bootstrap", "true"),
            ],
        }
    }

    pub fn default_grid(self) -> Vec<(String, Vec<String>)> {
        let grid: &[(&str, &[&str])] = match self {
            ModelKind::Cnn => &[("lr", &["0.01", "0.05"]), ("dropout", &["0.3", "0.5"]), ("n_filters", &["32", "64"])],
            ModelKind::Lstm | ModelKind::Gru => &[("lr", &["0.01", "0.05"]), ("epochs", &["10", "20"])],
            ModelKind::LogReg => &[("l2", &["0.0001", "0.01"])],
            ModelKind::Svm => &[("c", &["0.1", "1", "10"])],
            ModelKind::Forest => &[("n_trees", &["50", "100"]), ("max_depth", &["10", "none"])],
        };
        grid.iter().map(|(k, vs)| (k.to_string(), vs.iter().map(|v| v.to_string()).collect())).collect()
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|m| m.as_str() == s.trim().to_ascii_lowercase()).ok_or_else(|| {
            Error::Config(format!("unknown model `{s}` (expected cnn, lstm, gru, logreg, svm or forest)"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Augmentation {
    pub enabled: bool,
    pub target_ratio: f64,
}

impl Default for Augmentation {
    fn default() -> Self {
        Augmentation { enabled: false, target_ratio: 1.0 }
    }
}

/// Everything that determines a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub model: ModelKind,
    pub preprocess: RootMode,
    pub seed: u64,
    pub drop_hashtag_body: bool,
    pub augmentation: Augmentation,
    /// Explicitly set hyperparameters, in the order they were set.
    hyperparameters: Vec<(String, String)>,
}

/// Keys that configure the run rather than the model.
pub const SETTING_KEYS: [&str; 7] =
    ["task", "model", "preprocess", "seed", "augment", "target_ratio", "drop_hashtag_body"];

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("`{key}` has an invalid value `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("`{key}` expects true or false, got `{value}`"))),
    }
}

fn parse_optional(key: &str, value: &str, none: &str) -> Result<Option<usize>> {
    if value.trim() == none {
        Ok(None)
    } else {
        let v: usize = parse_num(key, value)?;
        if v == 0 {
            return Err(Error::Config(format!("`{key}` must be positive")));
        }
        Ok(Some(v))
    }
}

fn parse_kernel_sizes(value: &str) -> Result<Vec<usize>> {
    let sizes: Vec<usize> = value.split_whitespace().map(|v| parse_num("kernel_sizes", v)).collect::<Result<_>>()?;
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::Config("`kernel_sizes` needs positive sizes separated by spaces".into()));
    }
    Ok(sizes)
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Config(format!("`{key}` must be positive, got {v}")))
    }
}

fn check_value(model: ModelKind, key: &str, value: &str) -> Result<()> {
    match key {
        "lr" | "l2" | "c" | "clip_norm" => positive(key, parse_num(key, value)?).map(drop),
        "dropout" => {
            let p: f64 = parse_num(key, value)?;
            if (0.0..1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Config(format!("`dropout` must lie in [0, 1), got {p}")))
            }
        }
        "kernel_sizes" => parse_kernel_sizes(value).map(drop),
        "max_len" => parse_optional(key, value, "auto").map(drop),
        "max_depth" => parse_optional(key, value, "none").map(drop),
        "features_per_split" => parse_optional(key, value, "auto").map(drop),
        "bootstrap" => parse_bool(key, value).map(drop),
        "min_samples_split" => {
            let v: usize = parse_num(key, value)?;
            if v < 2 {
                return Err(Error::Config("`min_samples_split` must be at least 2".into()));
            }
            Ok(())
        }
        _ => {
            let v: usize = parse_num(key, value)?;
            if v == 0 {
                return Err(Error::Config(format!("`{key}` for {model} must be positive")));
            }
            Ok(())
        }
    }
}

impl RunConfig {
    pub fn new(task: Task, model: ModelKind) -> Self {
        RunConfig {
            task,
            model,
            preprocess: RootMode::None,
            seed: 0,
            drop_hashtag_body: false,
            augmentation: Augmentation::default(),
            hyperparameters: Vec::new(),
        }
    }

    /// Set a hyperparameter after checking the key and value against the model.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim();
        let value = value.trim();
        if !self.model.defaults().iter().any(|(k, _)| *k == key) {
            let known: Vec<&str> = self.model.defaults().iter().map(|(k, _)| *k).collect();
            return Err(Error::Config(format!(
                "unknown hyperparameter `{key}` for {} (known: {})",
                self.model,
                known.join(", ")
            )));
        }
        check_value(self.model, key, value)?;
        match self.hyperparameters.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value.to_string(),
            None => self.hyperparameters.push((key.to_string(), value.to_string())),
        }
        Ok(())
    }

    pub fn with(mut self, key: &str, value: &str) -> Result<Self> {
        self.set(key, value)?;
        Ok(self)
    }

    /// Apply a run setting (`task`, `seed`, ...) or, failing that, a hyperparameter.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "task" => self.task = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "model" => {
                let model: ModelKind = value.parse()?;
                if model != self.model && !self.hyperparameters.is_empty() {
                    return Err(Error::Config("`model` must be set before its hyperparameters".into()));
                }
                self.model = model;
            }
            "preprocess" => self.preprocess = value.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            "seed" => self.seed = parse_num(key, value)?,
            "augment" => self.augmentation.enabled = parse_bool(key, value)?,
            "target_ratio" => {
                let r: f64 = parse_num(key, value)?;
                if !(r > 0.0 && r <= 1.0) {
                    return Err(Error::Config(format!("`target_ratio` must lie in (0, 1], got {r}")));
                }
                self.augmentation.target_ratio = r;
            }
            "drop_hashtag_body" => self.drop_hashtag_body = parse_bool(key, value)?,
            _ => self.set(key, value)?,
        }
        Ok(())
    }

    /// Explicitly set hyperparameters.
    pub fn overrides(&self) -> &[(String, String)] {
        &self.hyperparameters
    }

    /// Value of a hyperparameter, falling back to the model default.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.hyperparameters
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .or_else(|| self.model.defaults().iter().find(|(k, _)| *k == key).map(|(_, v)| *v))
    }

    /// Every hyperparameter of the model with its effective value.
    pub fn resolved(&self) -> Vec<(&'static str, String)> {
        self.model.defaults().iter().map(|(k, _)| (*k, self.get(k).unwrap_or_default().to_string())).collect()
    }

    fn num<T: FromStr>(&self, key: &str) -> Result<T> {
        parse_num(key, self.get(key).unwrap_or_default())
    }

    pub fn preprocessor(&self) -> Preprocessor {
        let mut p = Preprocessor::new(self.preprocess);
        p.clean = CleanOptions { drop_hashtag_body: self.drop_hashtag_body };
        p
    }

    pub fn logreg_params(&self) -> Result<LogRegParams> {
        Ok(LogRegParams {
            l2: self.num("l2")?,
            learning_rate: self.num("lr")?,
            epochs: self.num("epochs")?,
            batch_size: self.num("batch_size")?,
        })
    }

    pub fn svm_params(&self) -> Result<SvmParams> {
        Ok(SvmParams {
            c: self.num("c")?,
            learning_rate: self.num("lr")?,
            epochs: self.num("epochs")?,
            batch_size: self.num("batch_size")?,
        })
    }

    pub fn forest_params(&self) -> Result<ForestParams> {
        Ok(ForestParams {
            n_trees: self.num("n_trees")?,
            max_depth: parse_optional("max_depth", self.get("max_depth").unwrap_or_default(), "none")?,
            min_samples_split: self.num("min_samples_split")?,
            features_per_split: parse_optional(
                "features_per_split",
                self.get("features_per_split").unwrap_or_default(),
                "auto",
            )?,
            bootstrap: parse_bool("bootstrap", self.get("bootstrap").unwrap_or_default())?,
        })
    }

    pub fn neural_params(&self) -> Result<NeuralParams> {
        let mut p = NeuralParams {
            learning_rate: self.num("lr")?,
            epochs: self.num("epochs")?,
            batch_size: self.num("batch_size")?,
            embed_dim: self.num("embed_dim")?,
            clip_norm: self.num("clip_norm")?,
            ..NeuralParams::default()
        };
        match self.model {
            ModelKind::Cnn => {
                p.dropout = self.num("dropout")?;
                p.n_filters = self.num("n_filters")?;
                p.kernel_sizes = parse_kernel_sizes(self.get("kernel_sizes").unwrap_or_default())?;
            }
            ModelKind::Lstm | ModelKind::Gru => {
                p.hidden_size = self.num("hidden_size")?;
                p.head_size = self.num("head_size")?;
            }
            _ => return Err(Error::Config(format!("{} is not a neural model", self.model))),
        }
        Ok(p)
    }

    /// Fixed sequence length, or `None` to use the longest training tweet.
    pub fn max_len(&self) -> Result<Option<usize>> {
        match self.get("max_len") {
            Some(v) => parse_optional("max_len", v, "auto"),
            None => Ok(None),
        }
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "model={}", self.model)?;
        for (k, v) in &self.hyperparameters {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// A parsed `key = value` configuration file. Comma-separated values are
/// grid alternatives.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: Vec<(String, Vec<String>)>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: Vec<(String, Vec<String>)> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse { line: n + 1, message: "empty key".into() });
            }
            if entries.iter().any(|(k, _)| k == key) {
                return Err(Error::Parse { line: n + 1, message: format!("duplicate key `{key}`") });
            }
            let values: Vec<String> = value.split(',').map(|v| v.trim().to_string()).collect();
            if values.iter().any(String::is_empty) {
                return Err(Error::Parse { line: n + 1, message: format!("`{key}` has an empty value") });
            }
            entries.push((key.to_string(), values));
        }
        Ok(ConfigFile { entries })
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn from_entries(entries: Vec<(String, Vec<String>)>) -> Self {
        ConfigFile { entries }
    }

    pub fn entries(&self) -> &[(String, Vec<String>)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&[String]> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_slice())
    }

    pub fn is_grid(&self) -> bool {
        self.entries.iter().any(|(_, v)| v.len() > 1)
    }

    /// Apply the run settings to `base`, then expand hyperparameters into the
    /// Cartesian product. The first key varies slowest.
    pub fn expand(&self, mut base: RunConfig) -> Result<Vec<RunConfig>> {
        for key in SETTING_KEYS {
            if let Some(values) = self.get(key) {
                if values.len() != 1 {
                    return Err(Error::Config(format!("`{key}` cannot take several values")));
                }
                base.apply(key, &values[0])?;
            }
        }
        let mut grid = vec![base];
        for (key, values) in &self.entries {
            if SETTING_KEYS.contains(&key.as_str()) {
                continue;
            }
            let mut next = Vec::with_capacity(grid.len() * values.len());
            for config in &grid {
                for v in values {
                    next.push(config.clone().with(key, v)?);
                }
            }
            grid = next;
        }
        Ok(grid)
    }

    /// Like [`ConfigFile::expand`] but requires a single configuration.
    pub fn single(&self, base: RunConfig) -> Result<RunConfig> {
        let mut grid = self.expand(base)?;
        if grid.len() != 1 {
            return Err(Error::Config(format!(
                "configuration expands to {} runs; use gridsearch for lists of values",
                grid.len()
            )));
        }
        Ok(grid.remove(0))
    }
}

/// Turns token lists into model input.
#[derive(Debug, Clone, PartialEq)]
pub enum Featurizer {
    Tfidf(TfidfModel),
    Sequence { vocabulary: Vocabulary, max_len: usize },
}

impl Featurizer {
    /// Whether `word` is known to the fitted features (not OOV).
    pub fn knows(&self, word: &str) -> bool {
        match self {
            Featurizer::Tfidf(m) => m.column(word).is_some(),
            Featurizer::Sequence { vocabulary, .. } => vocabulary.contains(word),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Linear(LinearModel),
    Forest(ForestModel),
    Neural(NeuralModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    /// Final training loss, for models that minimize one.
    pub final_loss: Option<f64>,
    /// Accuracy on the training examples, synthetic rows excluded.
    pub train_accuracy: f64,
    pub n_train: usize,
    pub n_augmented: usize,
}

/// A trained model together with everything needed to label raw tweets.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    config: RunConfig,
    featurizer: Featurizer,
    model: TrainedModel,
}

/// Fit preprocessing, features and model on `train`, augmenting first when enabled.
pub fn fit_pipeline(config: &RunConfig, train: &Dataset) -> Result<(FittedPipeline, FitSummary)> {
    if train.task() != config.task {
        return Err(Error::InvalidArgument(format!(
            "dataset is for task {} but the run is for task {}",
            train.task(),
            config.task
        )));
    }
    let data = if config.augmentation.enabled {
        augment_minority(train, config.augmentation.target_ratio, config.seed)?
    } else {
        train.clone()
    };
    let n_augmented = data.len() - train.len();
    let y = data.class_indices()?;
    let n_classes = config.task.n_classes();
    let corpus = config.preprocessor().corpus(&data);

    let (featurizer, model, final_loss) = match config.model.neural_kind() {
        None => {
            let tfidf = TfidfModel::fit(&corpus)?;
            let x = tfidf.transform_batch(&corpus);
            let problem = Problem::new(&x, &y, tfidf.n_features(), n_classes)?;
            let (model, loss) = match config.model {
                ModelKind::LogReg => {
                    let m = train_logreg(&problem, &config.logreg_params()?, config.seed)?;
                    let loss = m.loss_history.last().copied();
                    (TrainedModel::Linear(m), loss)
                }
                ModelKind::Svm => {
                    let m = train_linear_svm(&problem, &config.svm_params()?, config.seed)?;
                    let loss = m.loss_history.last().copied();
                    (TrainedModel::Linear(m), loss)
                }
                _ => (TrainedModel::Forest(train_forest(&problem, &config.forest_params()?, config.seed)?), None),
            };
            (Featurizer::Tfidf(tfidf), model, loss)
        }
        Some(kind) => {
            let params = config.neural_params()?;
            let vocabulary = Vocabulary::build(&corpus);
            let longest = config.max_len()?.unwrap_or_else(|| max_corpus_length(&corpus));
            let min_len =
                if kind == NeuralKind::Cnn { params.kernel_sizes.iter().copied().max().unwrap_or(1) } else { 1 };
            let max_len = longest.max(min_len);
            let seqs = encode_batch(&corpus, &vocabulary, max_len);
            let encoded = EncodedData::new(seqs, y, n_classes, vocabulary.index_space())?;
            let trained = train_neural(kind, &encoded, &params, config.seed)?;
            let loss = trained.loss_history.last().copied();
            (Featurizer::Sequence { vocabulary, max_len }, TrainedModel::Neural(trained.model), loss)
        }
    };
    let pipeline = FittedPipeline { config: config.clone(), featurizer, model };
    let predicted = pipeline.predict_indices(train)?;
    let truth = train.class_indices()?;
    let hits = predicted.iter().zip(&truth).filter(|(a, b)| a == b).count();
    let summary =
        FitSummary { final_loss, train_accuracy: hits as f64 / truth.len() as f64, n_train: train.len(), n_augmented };
    Ok((pipeline, summary))
}

impl FittedPipeline {
    pub fn from_parts(config: RunConfig, featurizer: Featurizer, model: TrainedModel) -> Result<Self> {
        let consistent = matches!(
            (&featurizer, &model, config.model.neural_kind()),
            (Featurizer::Tfidf(_), TrainedModel::Linear(_), None)
                | (Featurizer::Tfidf(_), TrainedModel::Forest(_), None)
                | (Featurizer::Sequence { .. }, TrainedModel::Neural(_), Some(_))
        );
        if !consistent {
            return Err(Error::Format(format!("features and model do not fit a {} run", config.model)));
        }
        Ok(FittedPipeline { config, featurizer, model })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn featurizer(&self) -> &Featurizer {
        &self.featurizer
    }

    pub fn model(&self) -> &TrainedModel {
        &self.model
    }

    pub fn task(&self) -> Task {
        self.config.task
    }

    /// Class index per example, in dataset order.
    pub fn predict_indices(&self, ds: &Dataset) -> Result<Vec<usize>> {
        let corpus = self.config.preprocessor().corpus(ds);
        match (&self.featurizer, &self.model) {
            (Featurizer::Tfidf(tfidf), TrainedModel::Linear(m)) => predict_linear(m, &tfidf.transform_batch(&corpus)),
            (Featurizer::Tfidf(tfidf), TrainedModel::Forest(m)) => {
                Ok(predict_forest(m, &tfidf.transform_batch(&corpus)))
            }
            (Featurizer::Sequence { vocabulary, max_len }, TrainedModel::Neural(m)) => {
                encode_batch(&corpus, vocabulary, *max_len).iter().map(|s| m.predict(s)).collect()
            }
            _ => Err(Error::Format("features and model do not match".into())),
        }
    }

    pub fn predict_labels(&self, ds: &Dataset) -> Result<Vec<Label>> {
        let classes = self.config.task.classes();
        Ok(self.predict_indices(ds)?.into_iter().map(|i| classes[i]).collect())
    }
}

impl Predictor for FittedPipeline {
    fn predict(&self, ds: &Dataset) -> Result<Vec<Label>> {
        self.predict_labels(ds)
    }
}

/// [`Trainer`] that fits a full pipeline from a [`RunConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineTrainer {
    pub config: RunConfig,
}

impl Trainer for PipelineTrainer {
    fn fit(&self, train: &Dataset) -> Result<Box<dyn Predictor>> {
        Ok(Box::new(fit_pipeline(&self.config, train)?.0))
    }
}
