//! Command-line front end: `train`, `cv`, `gridsearch`, `predict`, `evaluate`.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 data error,
//! 4 training failure.

use std::collections::HashSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{load_olid_tsv, Dataset, Label, Task};
use crate::evaluation::{confusion, cross_validate, grid_search, EvalReport};
use crate::persist::{load_model, save_model};
use crate::pipeline::{fit_pipeline, ConfigFile, ModelKind, PipelineTrainer, RunConfig};
use crate::preprocess::RootMode;
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DATA: i32 = 3;
pub const EXIT_TRAINING: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "offenseval", version, about = "Offensive-language classification for tweets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train on a labeled OLID file and write a model artifact.
    Train(TrainArgs),
    /// Stratified k-fold cross-validation of one configuration.
    Cv(CvArgs),
    /// Cross-validate every configuration of a hyperparameter grid.
    Gridsearch(GridArgs),
    /// Label an OLID file with a trained model and write `id,label` CSV.
    Predict(PredictArgs),
    /// Score a predictions CSV against a gold CSV.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Sub-task: a, b or c.
    #[arg(long)]
    pub task: Option<Task>,
    /// cnn, lstm, gru, logreg, svm or forest.
    #[arg(long)]
    pub model: Option<ModelKind>,
    /// Labeled OLID TSV file.
    #[arg(long)]
    pub data: PathBuf,
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Root reduction: none, stem or lemma.
    #[arg(long)]
    pub preprocess: Option<RootMode>,
    /// Add synthetic minority-class tweets to every training set.
    #[arg(long)]
    pub augment: bool,
    /// Minority/majority ratio targeted by `--augment`.
    #[arg(long)]
    pub target_ratio: Option<f64>,
    /// Remove hashtags entirely instead of keeping their text.
    #[arg(long)]
    pub drop_hashtag_body: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Where to write the model artifact.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional key-value report file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 5)]
    pub k: usize,
    /// Train the best configuration on all data and save it here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Model artifact written by `train` or `gridsearch --out`.
    #[arg(long)]
    pub model: PathBuf,
    /// OLID TSV file, labeled or unlabeled.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predictions CSV (`id,label`).
    #[arg(long)]
    pub pred: PathBuf,
    /// Gold CSV (`id,label`).
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Config(_) => EXIT_USAGE,
        Error::Fold { source, .. } | Error::GridConfig { source, .. } => exit_code(source),
        e if e.is_data_error() => EXIT_DATA,
        _ => EXIT_TRAINING,
    }
}

/// Parse `args` (program name first), run the command and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(command: &Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Train(a) => cmd_train(a, out),
        Command::Cv(a) => cmd_cv(a, out),
        Command::Gridsearch(a) => cmd_gridsearch(a, out),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
    }
}

/// Resolve task and model, expand the config file, then apply flag overrides.
fn run_configs(run: &RunArgs, default_grid: bool) -> Result<Vec<RunConfig>> {
    let file = match &run.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let from_file = |key: &str| file.get(key).and_then(|v| v.first()).map(String::as_str);
    let task = match (run.task, from_file("task")) {
        (Some(t), Some(f)) if f.parse::<Task>().ok() != Some(t) => {
            return Err(Error::Config(format!("--task {t} conflicts with `task = {f}` in the config file")))
        }
        (Some(t), _) => t,
        (None, Some(f)) => f.parse().map_err(|e: Error| Error::Config(e.to_string()))?,
        (None, None) => return Err(Error::Config("no task given (use --task or `task =` in the config)".into())),
    };
    let model = match (run.model, from_file("model")) {
        (Some(m), Some(f)) if f.parse::<ModelKind>().ok() != Some(m) => {
            return Err(Error::Config(format!("--model {m} conflicts with `model = {f}` in the config file")))
        }
        (Some(m), _) => m,
        (None, Some(f)) => f.parse()?,
        (None, None) => return Err(Error::Config("no model given (use --model or `model =` in the config)".into())),
    };
    let file = if default_grid && !file.is_grid() {
        let mut entries = file.entries().to_vec();
        for (k, v) in model.default_grid() {
            if !entries.iter().any(|(e, _)| *e == k) {
                entries.push((k, v));
            }
        }
        ConfigFile::from_entries(entries)
    } else {
        file
    };
    let mut configs = file.expand(RunConfig::new(task, model))?;
    for c in &mut configs {
        if let Some(seed) = run.seed {
            c.seed = seed;
        }
        if let Some(mode) = run.preprocess {
            c.preprocess = mode;
        }
        if run.augment {
            c.augmentation.enabled = true;
        }
        if let Some(r) = run.target_ratio {
            c.apply("target_ratio", &r.to_string())?;
        }
        if run.drop_hashtag_body {
            c.drop_hashtag_body = true;
        }
    }
    Ok(configs)
}

fn single_config(run: &RunArgs) -> Result<RunConfig> {
    let mut configs = run_configs(run, false)?;
    if configs.len() != 1 {
        return Err(Error::Config(format!(
            "configuration expands to {} runs; use gridsearch for lists of values",
            configs.len()
        )));
    }
    Ok(configs.remove(0))
}

fn load_training_data(path: &Path, task: Task) -> Result<Dataset> {
    let ds = load_olid_tsv(path, task)?;
    if ds.is_empty() {
        return Err(Error::Validation(format!("{} has no examples labeled for task {task}", path.display())));
    }
    if !ds.is_labeled() {
        return Err(Error::Validation(format!("{} has no labels", path.display())));
    }
    Ok(ds)
}

fn config_header(config: &RunConfig) -> Vec<(String, String)> {
    let mut kv = vec![
        ("task".to_string(), config.task.to_string()),
        ("model".into(), config.model.to_string()),
        ("preprocess".into(), config.preprocess.to_string()),
        ("seed".into(), config.seed.to_string()),
        ("augment".into(), config.augmentation.enabled.to_string()),
    ];
    if config.augmentation.enabled {
        kv.push(("target_ratio".into(), config.augmentation.target_ratio.to_string()));
    }
    kv.extend(config.resolved().into_iter().map(|(k, v)| (format!("hp.{k}"), v)));
    kv
}

/// Render `key = value` lines.
pub fn render_report(pairs: &[(String, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

/// Write via a temporary file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name =
        path.file_name().ok_or_else(|| Error::InvalidArgument(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    Ok(result?)
}

fn write_report(path: &Option<PathBuf>, pairs: &[(String, String)]) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, render_report(pairs).as_bytes()),
        None => Ok(()),
    }
}

pub fn cmd_train(args: &TrainArgs, out: &mut dyn Write) -> Result<()> {
    let config = single_config(&args.run)?;
    let ds = load_training_data(&args.run.data, config.task)?;
    let (pipeline, summary) = fit_pipeline(&config, &ds)?;
    let bytes = save_model(&pipeline);
    let mut kv = vec![("command".to_string(), "train".to_string())];
    kv.extend(config_header(&config));
    kv.push(("n_train".into(), summary.n_train.to_string()));
    kv.push(("n_augmented".into(), summary.n_augmented.to_string()));
    if let Some(loss) = summary.final_loss {
        kv.push(("final_loss".into(), loss.to_string()));
    }
    kv.push(("train_accuracy".into(), summary.train_accuracy.to_string()));
    write_atomic(&args.out, &bytes)?;
    write_report(&args.report, &kv)?;
    let loss = summary.final_loss.map_or(String::new(), |l| format!(" final_loss={l:.6}"));
    writeln!(
        out,
        "trained {} on {} examples ({} synthetic):{loss} train_accuracy={:.4}",
        config.model, summary.n_train, summary.n_augmented, summary.train_accuracy
    )?;
    writeln!(out, "wrote {}", args.out.display())?;
    Ok(())
}

pub fn cmd_cv(args: &CvArgs, out: &mut dyn Write) -> Result<()> {
    let config = single_config(&args.run)?;
    let ds = load_training_data(&args.run.data, config.task)?;
    let report = cross_validate(&PipelineTrainer { config: config.clone() }, &ds, args.k, config.seed)?;
    let mut kv = vec![("command".to_string(), "cv".to_string())];
    kv.extend(config_header(&config));
    kv.extend(report.key_values(""));
    write_report(&args.report, &kv)?;
    writeln!(out, "{report}")?;
    Ok(())
}

pub fn cmd_gridsearch(args: &GridArgs, out: &mut dyn Write) -> Result<()> {
    let grid = run_configs(&args.run, args.run.config.is_none())?;
    let ds = load_training_data(&args.run.data, grid[0].task)?;
    let seed = grid[0].seed;
    let result = grid_search(|c: &RunConfig| Ok(PipelineTrainer { config: c.clone() }), &grid, &ds, args.k, seed)?;
    let mut kv = vec![("command".to_string(), "gridsearch".to_string()), ("k".into(), args.k.to_string())];
    kv.extend(config_header(&grid[0]).into_iter().filter(|(k, _)| !k.starts_with("hp.")));
    for (i, (config, score)) in result.all.iter().enumerate() {
        kv.push((format!("grid.{}.config", i + 1), config.to_string()));
        kv.push((format!("grid.{}.mean_macro_f1", i + 1), score.to_string()));
        kv.push((format!("grid.{}.mean_accuracy", i + 1), result.reports[i].mean_accuracy.to_string()));
    }
    kv.push(("best.index".into(), (result.best_index + 1).to_string()));
    kv.push(("best.config".into(), result.best_config.to_string()));
    kv.push(("best.mean_macro_f1".into(), result.best_score.to_string()));
    let artifact = match &args.out {
        Some(_) => Some(save_model(&fit_pipeline(&result.best_config, &ds)?.0)),
        None => None,
    };
    if let (Some(path), Some(bytes)) = (&args.out, &artifact) {
        write_atomic(path, bytes)?;
    }
    write_report(&args.report, &kv)?;
    for (i, (config, score)) in result.all.iter().enumerate() {
        writeln!(out, "config {}: {config} mean_macro_f1={score:.4}", i + 1)?;
    }
    writeln!(
        out,
        "best: config {}: {} mean_macro_f1={:.4}",
        result.best_index + 1,
        result.best_config,
        result.best_score
    )?;
    if let Some(path) = &args.out {
        writeln!(out, "wrote {}", path.display())?;
    }
    Ok(())
}

pub fn cmd_predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let pipeline = load_model(&fs::read(&args.model)?)?;
    let ds = load_olid_tsv(&args.data, pipeline.task())?;
    let labels = pipeline.predict_labels(&ds)?;
    let rows: Vec<(String, Label)> = ds.iter().map(|e| e.id().to_string()).zip(labels).collect();
    write_atomic(&args.out, render_predictions_csv(&rows).as_bytes())?;
    writeln!(out, "wrote {} predictions to {}", rows.len(), args.out.display())?;
    Ok(())
}

pub fn cmd_evaluate(args: &EvaluateArgs, out: &mut dyn Write) -> Result<()> {
    let pred = parse_predictions_csv(&fs::read_to_string(&args.pred)?)?;
    let gold = parse_predictions_csv(&fs::read_to_string(&args.gold)?)?;
    let report = evaluate_csv(&pred, &gold)?;
    let mut kv = vec![("command".to_string(), "evaluate".to_string())];
    kv.extend(report.key_values(""));
    write_report(&args.report, &kv)?;
    writeln!(out, "{report}")?;
    Ok(())
}

pub fn render_predictions_csv(rows: &[(String, Label)]) -> String {
    let mut s = String::from("id,label\n");
    for (id, label) in rows {
        s.push_str(&format!("{id},{label}\n"));
    }
    s
}

/// Parse an `id,label` CSV with header. Ids must be unique.
pub fn parse_predictions_csv(text: &str) -> Result<Vec<(String, Label)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim().trim_start_matches('\u{feff}') == "id,label" => {}
        _ => return Err(Error::Parse { line: 1, message: "expected header `id,label`".into() }),
    }
    let mut seen = HashSet::new();
    let mut rows = Vec::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (id, label) = line
            .split_once(',')
            .filter(|(_, l)| !l.contains(','))
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected `id,label`, got `{line}`") })?;
        let id = id.trim();
        if id.is_empty() {
            return Err(Error::Parse { line: i + 1, message: "empty id".into() });
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::Validation(format!("duplicate id `{id}` on line {}", i + 1)));
        }
        rows.push((id.to_string(), label.trim().parse()?));
    }
    Ok(rows)
}

/// Join predictions to gold labels by id and score them.
pub fn evaluate_csv(pred: &[(String, Label)], gold: &[(String, Label)]) -> Result<EvalReport> {
    let task = gold.first().map(|(_, l)| l.task()).ok_or_else(|| Error::Validation("gold file has no rows".into()))?;
    if let Some((id, l)) = gold.iter().chain(pred).find(|(_, l)| l.task() != task) {
        return Err(Error::Validation(format!("label {l} of `{id}` does not belong to task {task}")));
    }
    let lookup: std::collections::HashMap<&str, Label> = pred.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let missing = gold.iter().filter(|(id, _)| !lookup.contains_key(id.as_str())).count();
    let gold_ids: HashSet<&str> = gold.iter().map(|(id, _)| id.as_str()).collect();
    let unknown = pred.iter().filter(|(id, _)| !gold_ids.contains(id.as_str())).count();
    if missing > 0 || unknown > 0 {
        return Err(Error::Validation(format!(
            "ids do not match: {missing} gold ids lack a prediction, {unknown} predicted ids are not in the gold file"
        )));
    }
    let truth: Vec<Label> = gold.iter().map(|(_, l)| *l).collect();
    let predicted: Vec<Label> = gold.iter().map(|(id, _)| lookup[id.as_str()]).collect();
    Ok(EvalReport::from_confusion(&confusion(&truth, &predicted, task.classes())?))
}
