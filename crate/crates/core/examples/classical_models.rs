//! Logistic regression, linear SVM and random forest over TF-IDF features.

use offenseval::classical::*;
use offenseval::corpus::{split_holdout, synthetic_corpus, SyntheticConfig};
use offenseval::evaluation::{confusion, EvalReport};
use offenseval::features::fit_tfidf;
use offenseval::preprocess::{Preprocessor, RootMode};

fn main() -> offenseval::Result<()> {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 1000, ..Default::default() }, 3)?;
    let (train, valid) = split_holdout(&ds, 0.8, 0)?;
    let p = Preprocessor::new(RootMode::Stem);
    let tokens = p.corpus(&train);
    let tfidf = fit_tfidf(&tokens)?;
    let x_train = tfidf.transform_batch(&tokens);
    let x_valid = tfidf.transform_batch(&p.corpus(&valid));
    let y_train = train.class_indices()?;
    let y_valid = valid.class_indices()?;
    let problem = Problem::new(&x_train, &y_train, tfidf.n_features(), 2)?;
    println!("{} training tweets, {} TF-IDF columns", train.len(), tfidf.n_features());

    let logreg = train_logreg(&problem, &LogRegParams::default(), 0)?;
    let first = logreg.loss_history[0];
    let last = *logreg.loss_history.last().unwrap();
    println!("logreg loss {first:.4} -> {last:.4}");
    let svm = train_linear_svm(&problem, &SvmParams::default(), 0)?;
    let forest = train_forest(&problem, &ForestParams { n_trees: 50, ..Default::default() }, 0)?;
    let depth = forest.trees.iter().map(|t| t.depth()).max().unwrap_or(0);
    println!("forest of {} trees, deepest {depth}", forest.trees.len());

    for (name, pred) in [
        ("logreg", predict_linear(&logreg, &x_valid)?),
        ("svm", predict_linear(&svm, &x_valid)?),
        ("forest", predict_forest(&forest, &x_valid)),
    ] {
        let report = EvalReport::from_confusion(&confusion(&y_valid, &pred, &[0, 1])?);
        println!("{name:>7}: {report}");
    }

    // The strongest positive weights of the logistic model.
    let off = logreg.row(0);
    let mut ranked: Vec<usize> = (0..off.len()).collect();
    ranked.sort_by(|&a, &b| off[b].total_cmp(&off[a]));
    let top: Vec<&str> = ranked.iter().take(8).map(|&c| tfidf.terms()[c].as_str()).collect();
    println!("most offensive terms: {top:?}");
    Ok(())
}
