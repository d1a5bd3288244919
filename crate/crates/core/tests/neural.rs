use offenseval::neural::*;
use offenseval::preprocess::IndexSequence;
use offenseval::{seeded_rng, Error};

fn seq(tokens: &[usize], len: usize) -> IndexSequence {
    let mut v = tokens.to_vec();
    v.resize(len, 0);
    IndexSequence::new(v, tokens.len()).unwrap()
}

fn t(shape: &[usize], data: &[f64]) -> Tensor {
    Tensor::from_vec(shape, data.to_vec()).unwrap()
}

fn rnn_config(e: usize, h: usize, d: usize) -> RnnConfig {
    RnnConfig { vocab_rows: 5, embed_dim: e, hidden_size: h, head_size: d, n_classes: 2 }
}

fn small_cnn(seed: u64) -> CnnModel {
    let config =
        CnnConfig { vocab_rows: 8, embed_dim: 4, n_filters: 3, kernel_sizes: vec![2, 3], dropout: 0.5, n_classes: 2 };
    CnnModel::new(config, &mut seeded_rng(seed)).unwrap()
}

#[test]
fn embed_looks_up_rows_and_zero_pads() {
    let model = small_cnn(1);
    let x = embed(model.embedding(), &seq(&[2], 3)).unwrap();
    assert_eq!(x.shape(), &[3, 4]);
    assert_eq!(x.row(0), model.embedding().row(2));
    assert!(x.row(1).iter().chain(x.row(2)).all(|&v| v == 0.0));
    assert!(embed(model.embedding(), &seq(&[8], 3)).is_err());
}

#[test]
fn embedding_gradient_touches_only_looked_up_rows_and_sums_repeats() {
    let model = NeuralModel::Lstm(LstmModel::new(rnn_config(3, 3, 4), &mut seeded_rng(3)).unwrap());
    let (_, g) = model.loss_and_grad(&seq(&[2, 3, 2], 4), 1, None).unwrap();
    assert_eq!(g.embedding.keys().copied().collect::<Vec<_>>(), vec![2, 3]);

    // Row 2 appears twice: its gradient is the derivative through both uses.
    let NeuralModel::Lstm(lstm) = &model else { unreachable!() };
    let h = 1e-6;
    let row = lstm.embedding().row(2).to_vec();
    let loss_at = |delta: f64| {
        let mut m = lstm.clone();
        let mut r = row.clone();
        r[0] += delta;
        m.embedding_mut().set_row(2, &r).unwrap();
        NeuralModel::Lstm(m).loss(&seq(&[2, 3, 2], 4), 1, None).unwrap()
    };
    let numeric = (loss_at(h) - loss_at(-h)) / (2.0 * h);
    assert!((numeric - g.embedding[&2][0]).abs() < 1e-7);
}

#[test]
fn conv_output_shapes_and_hand_values() {
    let x = Tensor::zeros(&[10, 2]);
    let f = Tensor::zeros(&[4, 3, 2]);
    let out = conv1d_relu_maxpool(&x, std::slice::from_ref(&f), &[Tensor::zeros(&[4])]).unwrap();
    assert_eq!(out.data(), &[0.0; 4]);
    let short = Tensor::zeros(&[2, 2]);
    assert!(conv1d_relu_maxpool(&short, &[f], &[Tensor::zeros(&[4])]).is_err());

    // Indicator of coordinate 1 with k = 1 on a 3×2 input: max(ReLU(-0.5), ReLU(2), ReLU(0.25)).
    let x = t(&[3, 2], &[1.0, -0.5, 3.0, 2.0, -4.0, 0.25]);
    let f = t(&[1, 1, 2], &[0.0, 1.0]);
    let out = conv1d_relu_maxpool(&x, &[f], &[t(&[1], &[0.0])]).unwrap();
    assert_eq!(out.data(), &[2.0]);
    // Negative everywhere → ReLU clamps to zero.
    let f = t(&[1, 1, 2], &[0.0, -1.0]);
    let out = conv1d_relu_maxpool(&t(&[3, 2], &[0.0, 1.0, 0.0, 2.0, 0.0, 3.0]), &[f], &[t(&[1], &[0.0])]).unwrap();
    assert_eq!(out.data(), &[0.0]);
}

#[test]
fn cnn_eval_mode_is_pure_and_dropout_free() {
    let model = small_cnn(2);
    let s = seq(&[3, 4, 5], 5);
    let mut rng = seeded_rng(9);
    let a = model.forward(&s, false, &mut rng).unwrap();
    let b = model.forward(&s, false, &mut seeded_rng(10)).unwrap();
    assert_eq!(a, b);
    assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert_eq!(a, NeuralModel::Cnn(model.clone()).predict_proba(&s).unwrap());

    let mut cfg = model.config().clone();
    cfg.dropout = 0.0;
    let no_drop = CnnModel::new(cfg, &mut seeded_rng(2)).unwrap();
    let train = no_drop.forward(&s, true, &mut seeded_rng(4)).unwrap();
    let eval = no_drop.forward(&s, false, &mut seeded_rng(4)).unwrap();
    assert_eq!(train, eval);
}

#[test]
fn dropout_mask_preserves_expectation() {
    let mut rng = seeded_rng(11);
    let input: Vec<f64> = (1..=64).map(|i| i as f64 * 0.05).collect();
    let expected: f64 = input.iter().sum();
    let trials = 10_000;
    let mut total = 0.0;
    for _ in 0..trials {
        let m = dropout_mask(input.len(), 0.5, &mut rng);
        total += input.iter().zip(&m).map(|(x, k)| x * k).sum::<f64>();
    }
    let mean = total / trials as f64;
    assert!((mean - expected).abs() <= 0.02 * expected, "{mean} vs {expected}");
    assert_eq!(dropout_mask(4, 0.0, &mut rng), vec![1.0; 4]);
}

#[test]
fn lstm_zero_weights_keep_zero_state() {
    let mut model = LstmModel::new(rnn_config(3, 2, 2), &mut seeded_rng(5)).unwrap();
    let (w, b) = model.gates_mut();
    w.iter_mut().chain(b.iter_mut()).for_each(|t| t.fill(0.0));
    for (h, c) in model.states(&seq(&[2, 3, 4], 4)).unwrap() {
        assert!(h.iter().chain(&c).all(|&v| v == 0.0));
    }
    let p = model.forward(&seq(&[2, 3, 4], 4)).unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

fn scalar_lstm() -> LstmModel {
    let mut model = LstmModel::new(rnn_config(1, 1, 1), &mut seeded_rng(0)).unwrap();
    model.embedding_mut().set_row(2, &[0.7]).unwrap();
    model.embedding_mut().set_row(3, &[-0.4]).unwrap();
    let (w, b) = model.gates_mut();
    // Gate order: input, forget, candidate, output. Columns: [x, h].
    w[0] = t(&[1, 2], &[0.5, 0.6]);
    w[1] = t(&[1, 2], &[0.5, 0.6]);
    w[2] = t(&[1, 2], &[-0.8, -1.1]);
    w[3] = t(&[1, 2], &[0.5, 0.6]);
    b.iter_mut().for_each(|t| t.fill(0.0));
    *model.head_mut() =
        DenseHead::from_parts(t(&[1, 1], &[-1.5]), t(&[1], &[0.0]), t(&[2, 1], &[2.0, -1.0]), t(&[2], &[0.0, 0.0]))
            .unwrap();
    model
}

#[test]
fn lstm_scalar_hand_trace() {
    let model = scalar_lstm();
    let states = model.states(&seq(&[2, 3], 3)).unwrap();
    assert!((states[0].1[0] - -0.2979884918312043).abs() < 1e-12);
    assert!((states[0].0[0] - -0.1698086188936254).abs() < 1e-12);
    assert!((states[1].1[0] - 0.07203325468820362).abs() < 1e-12);
    assert!((states[1].0[0] - 0.03056824656062273).abs() < 1e-12);
    let p = model.forward(&seq(&[2], 3)).unwrap();
    assert!((p[0] - 0.6822516335811798).abs() < 1e-12);
    assert!((p[1] - 0.3177483664188202).abs() < 1e-12);
}

#[test]
fn gru_scalar_hand_trace() {
    let mut model = GruModel::new(rnn_config(1, 1, 1), &mut seeded_rng(0)).unwrap();
    model.embedding_mut().set_row(2, &[0.7]).unwrap();
    model.embedding_mut().set_row(3, &[-0.4]).unwrap();
    let (w, b) = model.gates_mut();
    w[0] = t(&[1, 2], &[0.5, 0.6]);
    w[1] = t(&[1, 2], &[-0.3, 0.6]);
    w[2] = t(&[1, 2], &[0.9, -1.1]);
    b.iter_mut().for_each(|t| t.fill(0.0));
    let states = model.states(&seq(&[2, 3], 3)).unwrap();
    assert!((states[0][0] - 0.3273632396010388).abs() < 1e-12);
    assert!((states[1][0] - -0.09261966491846835).abs() < 1e-12);
}

#[test]
fn gru_closed_update_gate_carries_state() {
    let mut model = GruModel::new(rnn_config(3, 2, 2), &mut seeded_rng(6)).unwrap();
    let states = model.states(&seq(&[2, 3], 3)).unwrap();
    let first = states[0].clone();
    model.gates_mut().1[0].fill(-50.0);
    let closed = model.states(&seq(&[2, 3, 4], 4)).unwrap();
    for h in &closed {
        assert!(h.iter().all(|v| v.abs() < 1e-12));
    }
    assert!(first.iter().any(|v| v.abs() > 1e-6));
    let p = model.forward(&seq(&[2, 3, 4], 4)).unwrap();
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
}

#[test]
fn rnn_output_ignores_padding_length() {
    let lstm = NeuralModel::Lstm(LstmModel::new(rnn_config(3, 3, 4), &mut seeded_rng(7)).unwrap());
    let gru = NeuralModel::Gru(GruModel::new(rnn_config(3, 3, 4), &mut seeded_rng(7)).unwrap());
    for m in [lstm, gru] {
        let a = m.predict_proba(&seq(&[2, 4], 2)).unwrap();
        let b = m.predict_proba(&seq(&[2, 4], 7)).unwrap();
        assert_eq!(a, b);
        let empty = m.predict_proba(&seq(&[], 3)).unwrap();
        assert!((empty.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn grad_check_passes_for_every_kind() {
    for kind in NeuralKind::ALL {
        for seed in 0..3 {
            let err = grad_check(kind, &TinyConfig::default(), seed).unwrap();
            assert!(err < 1e-5, "{kind} seed {seed}: {err:e}");
        }
    }
    let too_big = TinyConfig { embed_dim: 5, ..TinyConfig::default() };
    assert!(grad_check(NeuralKind::Cnn, &too_big, 0).is_err());
}

/// Class 1 iff token 9 is present. Other tokens are drawn from 2..=8.
fn marker_task() -> EncodedData {
    let mut seqs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..20 {
        let len = 3 + i % 3;
        let mut toks: Vec<usize> = (0..len).map(|j| 2 + (i * 7 + j * 3) % 7).collect();
        let label = i % 2;
        if label == 1 {
            toks[(i / 2) % len] = 9;
        }
        seqs.push(seq(&toks, 6));
        labels.push(label);
    }
    EncodedData::new(seqs, labels, 2, 10).unwrap()
}

fn marker_params() -> NeuralParams {
    NeuralParams {
        epochs: 30,
        batch_size: 4,
        dropout: 0.0,
        n_filters: 16,
        learning_rate: 0.1,
        kernel_sizes: vec![1],
        embed_dim: 8,
        ..NeuralParams::default()
    }
}

#[test]
fn cnn_learns_marker_token() {
    let data = marker_task();
    for seed in 0..10 {
        let trained = train_neural(NeuralKind::Cnn, &data, &marker_params(), seed).unwrap();
        let correct =
            data.sequences().iter().zip(data.labels()).filter(|(s, &l)| trained.model.predict(s).unwrap() == l).count();
        assert_eq!(correct, 20, "seed {seed}");
    }
    let trained = train_neural(NeuralKind::Cnn, &data, &marker_params(), 1).unwrap();
    assert_eq!(trained.loss_history.len(), 30);
    assert!(trained.loss_history.iter().all(|l| l.is_finite()));
    let correct =
        data.sequences().iter().zip(data.labels()).filter(|(s, &l)| trained.model.predict(s).unwrap() == l).count();
    assert_eq!(correct, 20);
}

#[test]
fn training_is_deterministic_and_keeps_pad_zero() {
    let data = marker_task();
    for kind in NeuralKind::ALL {
        let params = NeuralParams { epochs: 3, dropout: 0.5, kernel_sizes: vec![1, 2], ..marker_params() };
        let a = train_neural(kind, &data, &params, 42).unwrap();
        let b = train_neural(kind, &data, &params, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.model.embedding().row(0).iter().all(|&v| v == 0.0));
        let c = train_neural(kind, &data, &params, 43).unwrap();
        assert_ne!(a.model, c.model);
    }
}

#[test]
fn divergence_names_the_epoch() {
    let data = marker_task();
    let params = NeuralParams { learning_rate: 1e300, clip_norm: 1e300, ..marker_params() };
    match train_neural(NeuralKind::Lstm, &data, &params, 1) {
        Err(Error::Diverged { epoch }) => assert!(epoch >= 1),
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn label_and_shape_errors() {
    let model = NeuralModel::Cnn(small_cnn(1));
    assert!(model.loss(&seq(&[2, 3], 4), 5, None).is_err());
    assert!(model.predict(&seq(&[2], 2)).is_err());
    assert!(EncodedData::new(vec![seq(&[2], 3)], vec![0, 1], 2, 5).is_err());
    assert!(EncodedData::new(vec![seq(&[7], 3)], vec![0], 2, 5).is_err());
}
