//! Grid search over a `key = value, value` configuration.

use offenseval::corpus::{synthetic_corpus, SyntheticConfig};
use offenseval::evaluation::grid_search;
use offenseval::pipeline::{ConfigFile, ModelKind, PipelineTrainer, RunConfig};

const GRID: &str = "
# the first key varies slowest
c = 0.1, 1, 10
epochs = 10, 50
lr = 0.05, 0.2
# single values apply to every configuration
preprocess = stem
";

fn main() -> offenseval::Result<()> {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 500, ..Default::default() }, 9)?;
    let grid = ConfigFile::parse(GRID)?.expand(RunConfig::new(ds.task(), ModelKind::Svm))?;
    println!("{} configurations", grid.len());

    let result = grid_search(|c: &RunConfig| Ok(PipelineTrainer { config: c.clone() }), &grid, &ds, 5, 1)?;
    for (i, (config, score)) in result.all.iter().enumerate() {
        let mark = if i == result.best_index { "*" } else { " " };
        println!("{mark} {config:<45} mean macro-F1 {score:.4}");
    }
    println!("best: {} ({:.4})", result.best_config, result.best_score);

    for model in ModelKind::ALL {
        let axes: Vec<String> = model.default_grid().iter().map(|(k, v)| format!("{k}={}", v.join("/"))).collect();
        println!("default grid for {model}: {}", axes.join(" "));
    }
    Ok(())
}
