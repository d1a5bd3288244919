use std::collections::BTreeMap;

use offenseval::features::*;
use offenseval::preprocess::{Vocabulary, OOV_INDEX, PAD_INDEX};
use proptest::prelude::*;

/// Independent recount: document frequencies from scratch, then
/// `count * ln(n / (df + 1))` for every term of `doc`.
fn brute_force(corpus: &[Vec<String>], doc: &[String]) -> BTreeMap<String, f64> {
    let n = corpus.len() as f64;
    let mut out = BTreeMap::new();
    for term in doc {
        if out.contains_key(term) {
            continue;
        }
        let df = corpus.iter().filter(|d| d.contains(term)).count();
        if df == 0 {
            continue;
        }
        let tf = doc.iter().filter(|t| *t == term).count() as f64;
        out.insert(term.clone(), tf * (n / (df as f64 + 1.0)).ln());
    }
    out
}

fn token_lists() -> impl Strategy<Value = Vec<Vec<String>>> {
    let doc = prop::collection::vec((0..50u32).prop_map(|w| format!("w{w}")), 0..=20);
    prop::collection::vec(doc, 200).prop_filter("needs a token", |c| c.iter().any(|d| !d.is_empty()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tfidf_matches_recount(corpus in token_lists()) {
        let model = fit_tfidf(&corpus).unwrap();
        for doc in &corpus {
            let got = transform_tfidf(&model, doc);
            let want = brute_force(&corpus, doc);
            for (col, term) in model.terms().iter().enumerate() {
                let expected = want.get(term).copied().unwrap_or(0.0);
                prop_assert!((got.get(col) - expected).abs() <= 1e-12, "{term}: {} vs {expected}", got.get(col));
            }
        }
    }

    #[test]
    fn unseen_terms_are_ignored(corpus in token_lists()) {
        let model = fit_tfidf(&corpus).unwrap();
        let v = transform_tfidf(&model, &["never-seen", "also-new"]);
        prop_assert!(v.is_empty());
    }
}

#[test]
fn hand_corpus() {
    let corpus = vec![vec!["dog", "cat"], vec!["dog"], vec!["bird"]];
    let m = fit_tfidf(&corpus).unwrap();
    let bird = m.column("bird").unwrap();
    assert_eq!(m.idf()[m.column("dog").unwrap()], 0.0);
    assert!((m.idf()[bird] - 0.405465).abs() < 1e-6);
    let v = transform_tfidf(&m, &["bird", "bird"]);
    assert_eq!(v.pairs().len(), 1);
    assert!((v.get(bird) - 0.810930).abs() < 1e-6);
    assert!(transform_tfidf(&m, &["dog"]).is_empty());

    let everywhere = vec![vec!["x"], vec!["x"], vec!["x"]];
    let m = fit_tfidf(&everywhere).unwrap();
    assert!((m.idf()[0] - (0.75f64).ln()).abs() < 1e-12);
}

#[test]
fn batch_encoding_pads_and_marks_oov() {
    let vocab = Vocabulary::build(&[vec!["a", "b"]]);
    let batch = encode_batch(&[vec!["b", "zzz"], vec![]], &vocab, 3);
    assert_eq!(batch[0].indices(), &[vocab.index_of("b").unwrap(), OOV_INDEX, PAD_INDEX]);
    assert_eq!(batch[0].true_length(), 2);
    assert_eq!(batch[1].indices(), &[PAD_INDEX; 3]);
}
