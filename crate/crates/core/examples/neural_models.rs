//! CNN, LSTM and GRU classifiers trained directly on padded index sequences.

use offenseval::corpus::{split_holdout, synthetic_corpus, SyntheticConfig};
use offenseval::evaluation::{confusion, macro_f1};
use offenseval::features::encode_batch;
use offenseval::neural::{train_neural, EncodedData, NeuralKind, NeuralParams};
use offenseval::preprocess::{max_corpus_length, Preprocessor, RootMode, Vocabulary};

fn main() -> offenseval::Result<()> {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 2000, ..Default::default() }, 11)?;
    let (train, valid) = split_holdout(&ds, 0.8, 0)?;
    let p = Preprocessor::new(RootMode::None);
    let tokens = p.corpus(&train);
    let vocab = Vocabulary::build(&tokens);
    let max_len = max_corpus_length(&tokens).max(4);
    let data =
        EncodedData::new(encode_batch(&tokens, &vocab, max_len), train.class_indices()?, 2, vocab.index_space())?;
    let valid_x = encode_batch(&p.corpus(&valid), &vocab, max_len);
    let valid_y = valid.class_indices()?;

    let params = NeuralParams { epochs: 10, embed_dim: 50, n_filters: 32, ..NeuralParams::default() };
    for kind in NeuralKind::ALL {
        let trained = train_neural(kind, &data, &params, 0)?;
        let pred = valid_x.iter().map(|s| trained.model.predict(s)).collect::<offenseval::Result<Vec<_>>>()?;
        let f1 = macro_f1(&confusion(&valid_y, &pred, &[0, 1])?);
        let losses: Vec<String> = trained.loss_history.iter().map(|l| format!("{l:.3}")).collect();
        println!("{kind}: loss [{}] validation macro-F1 {f1:.4}", losses.join(" "));
    }

    let trained = train_neural(NeuralKind::Lstm, &data, &params, 0)?;
    let probs = trained.model.predict_proba(&valid_x[0])?;
    println!("first validation tweet: {:?}, P(OFF) = {:.3}", valid.examples()[0].raw_text(), probs[0]);
    Ok(())
}
