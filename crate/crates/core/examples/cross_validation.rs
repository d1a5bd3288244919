//! Stratified k-fold cross-validation of full pipelines.

use offenseval::corpus::{make_folds, synthetic_corpus, SyntheticConfig};
use offenseval::evaluation::cross_validate;
use offenseval::pipeline::{ModelKind, PipelineTrainer, RunConfig};
use offenseval::preprocess::RootMode;

fn main() -> offenseval::Result<()> {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 600, ..Default::default() }, 5)?;
    let plan = make_folds(&ds, 5, 0)?;
    println!("fold sizes {:?}", plan.fold_sizes());

    for model in [ModelKind::LogReg, ModelKind::Svm, ModelKind::Forest] {
        let mut config = RunConfig::new(ds.task(), model);
        config.preprocess = RootMode::Stem;
        let report = cross_validate(&PipelineTrainer { config: config.clone() }, &ds, 5, 0)?;
        println!("{config}\n{report}\n");
    }

    // Neural models go through the same trainer interface.
    let config = RunConfig::new(ds.task(), ModelKind::Gru).with("epochs", "20")?.with("batch_size", "8")?;
    let report = cross_validate(&PipelineTrainer { config: config.clone() }, &ds, 3, 0)?;
    println!("{config}\n{report}");
    Ok(())
}
