use offenseval::corpus::*;
use offenseval::persist::*;
use offenseval::pipeline::*;
use offenseval::Error;

fn corpus(n: usize, seed: u64) -> Dataset {
    synthetic_corpus(&SyntheticConfig { n_examples: n, ..Default::default() }, seed).unwrap()
}

fn fitted(model: ModelKind) -> FittedPipeline {
    let mut config = RunConfig::new(Task::A, model);
    for (k, v) in [("epochs", "2"), ("embed_dim", "8"), ("n_filters", "4"), ("n_trees", "5"), ("hidden_size", "4")] {
        if model.defaults().iter().any(|(d, _)| *d == k) {
            config.set(k, v).unwrap();
        }
    }
    fit_pipeline(&config, &corpus(120, 1)).unwrap().0
}

#[test]
fn every_model_kind_round_trips_bit_for_bit() {
    let unseen = corpus(50, 99);
    for kind in ModelKind::ALL {
        let p = fitted(kind);
        let bytes = save_model(&p);
        assert_eq!(&bytes[..4], MAGIC);
        let back = load_model(&bytes).unwrap();
        assert_eq!(back, p, "{kind}");
        assert_eq!(save_model(&back), bytes, "{kind}");
        assert_eq!(back.predict_labels(&unseen).unwrap(), p.predict_labels(&unseen).unwrap());
    }
}

#[test]
fn corrupted_length_is_an_error() {
    let bytes = save_model(&fitted(ModelKind::LogReg));
    for len in [u64::MAX, bytes.len() as u64, 3] {
        let mut bad = bytes.clone();
        bad[16..24].copy_from_slice(&len.to_le_bytes());
        assert!(matches!(load_model(&bad), Err(Error::Format(_))), "length {len}");
    }
    for cut in [0, 3, 11, 30, bytes.len() - 1] {
        assert!(load_model(&bytes[..cut]).is_err(), "cut at {cut}");
    }
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(load_model(&extra).is_err());
}

#[test]
fn newer_version_and_wrong_magic_are_refused() {
    let mut bytes = save_model(&fitted(ModelKind::Svm));
    bytes[4..8].copy_from_slice(&(FORMAT_VERSION + 1).to_le_bytes());
    let msg = load_model(&bytes).unwrap_err().to_string();
    assert!(msg.contains("newer"), "{msg}");

    let mut bytes = save_model(&fitted(ModelKind::Svm));
    bytes[0] = b'X';
    assert!(load_model(&bytes).is_err());
}

#[test]
fn oov_words_do_not_crash_prediction() {
    let test = Dataset::new(
        Task::A,
        vec![
            Example::unlabeled("1", "qwertyuiop asdfghjkl").unwrap(),
            Example::unlabeled("2", "").unwrap(),
            Example::unlabeled("3", "@USER #zzzz 🙃").unwrap(),
        ],
    )
    .unwrap();
    for kind in ModelKind::ALL {
        assert_eq!(fitted(kind).predict_labels(&test).unwrap().len(), 3);
    }
}
