//! Train a pipeline, save the artifact, reload it and label unseen tweets.

use offenseval::cli::render_predictions_csv;
use offenseval::corpus::{synthetic_corpus, Dataset, Example, SyntheticConfig, Task};
use offenseval::persist::{load_model, save_model};
use offenseval::pipeline::{fit_pipeline, ModelKind, RunConfig};

fn main() -> offenseval::Result<()> {
    let train = synthetic_corpus(&SyntheticConfig { n_examples: 2000, ..Default::default() }, 1)?;
    let config = RunConfig::new(Task::A, ModelKind::Cnn).with("epochs", "10")?;
    let (pipeline, summary) = fit_pipeline(&config, &train)?;
    println!("{config}: final loss {:?}, train accuracy {:.4}", summary.final_loss, summary.train_accuracy);

    let bytes = save_model(&pipeline);
    println!("artifact: {} bytes", bytes.len());
    let restored = load_model(&bytes)?;

    let test = Dataset::new(
        Task::A,
        vec![
            Example::unlabeled("t1", "@USER you are a pathetic idiot #MAGA")?,
            Example::unlabeled("t2", "Lovely weather for the game today URL")?,
            Example::unlabeled("t3", "completely unseen vocabulary here")?,
        ],
    )?;
    let labels = restored.predict_labels(&test)?;
    assert_eq!(labels, pipeline.predict_labels(&test)?);
    let rows: Vec<(String, _)> = test.iter().map(|e| e.id().to_string()).zip(labels).collect();
    print!("{}", render_predictions_csv(&rows));
    Ok(())
}
