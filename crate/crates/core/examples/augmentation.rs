//! Balance the targeted/untargeted split with synthetic minority tweets.

use offenseval::corpus::{augment_minority, synthetic_corpus, SyntheticConfig, Task};
use offenseval::evaluation::holdout_evaluate;
use offenseval::pipeline::{ModelKind, PipelineTrainer, RunConfig};

fn main() -> offenseval::Result<()> {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 2000, ..Default::default() }, 7)?.restrict_to(Task::B);
    println!("task b class counts (TIN, UNT): {:?}", ds.class_counts()?);

    let grown = augment_minority(&ds, 1.0, 0)?;
    println!("after augmentation: {:?}", grown.class_counts()?);
    for e in grown.iter().filter(|e| e.is_augmented()).take(3) {
        println!("  {} {:?}", e.id(), e.raw_text());
    }

    // Augmentation inside the pipeline only touches training data.
    for enabled in [false, true] {
        let mut config = RunConfig::new(Task::B, ModelKind::LogReg);
        config.augmentation.enabled = enabled;
        let report = holdout_evaluate(&PipelineTrainer { config }, &ds, 0.8, 3)?;
        println!("augment={enabled}: {report}");
    }
    Ok(())
}
