use offenseval::corpus::*;
use offenseval::seeded_rng;
use rand::Rng as _;

fn task_b(rows: &[(&str, Label)]) -> Dataset {
    let examples = rows
        .iter()
        .enumerate()
        .map(|(i, (text, label))| Example::for_task(format!("t{i}"), *text, *label).unwrap())
        .collect();
    Dataset::new(Task::B, examples).unwrap()
}

#[test]
fn augmented_tweets_draw_from_the_minority_pool() {
    let mut rows = vec![("a b a", Label::Unt), ("b b a", Label::Unt)];
    rows.extend(std::iter::repeat_n(("you are a disgrace", Label::Tin), 6));
    let ds = task_b(&rows);
    let out = augment_minority(&ds, 1.0, 42).unwrap();

    assert_eq!(&out.examples()[..ds.len()], ds.examples());
    let synthetic: Vec<_> = out.iter().filter(|e| e.is_augmented()).collect();
    assert_eq!(synthetic.len(), 4);

    // Replay the documented recipe: a length draw, then that many pool draws.
    let pool = ["a", "b", "a", "b", "b", "a"];
    let mut rng = seeded_rng(42);
    for e in synthetic {
        assert_eq!(e.label(Task::B), Some(Label::Unt));
        let _source = rng.random_range(0..2);
        let words: Vec<&str> = (0..3).map(|_| pool[rng.random_range(0..pool.len())]).collect();
        assert_eq!(e.raw_text(), words.join(" "));
    }
}

#[test]
fn tsv_round_trip() {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 60, ..Default::default() }, 5).unwrap();
    let mut buf = Vec::new();
    write_olid_tsv(&ds, &mut buf).unwrap();
    let back = read_olid_tsv(buf.as_slice(), Task::A).unwrap();
    assert_eq!(back, ds);

    let b = read_olid_tsv(buf.as_slice(), Task::B).unwrap();
    assert_eq!(b, ds.restrict_to(Task::B));
    assert!(b.iter().all(|e| e.label(Task::A) == Some(Label::Off)));
}

#[test]
fn folds_partition_and_stratify() {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 103, ..Default::default() }, 1).unwrap();
    let plan = make_folds(&ds, 5, 9).unwrap();
    let sizes = plan.fold_sizes();
    assert_eq!(sizes.iter().sum::<usize>(), 103);
    assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);

    let labels = ds.class_indices().unwrap();
    let off_total = labels.iter().filter(|&&l| l == 0).count();
    let mut seen = vec![false; ds.len()];
    for f in 0..5 {
        let (train, valid) = plan.split(f);
        assert_eq!(train.len() + valid.len(), ds.len());
        for &i in &valid {
            assert!(!seen[i]);
            seen[i] = true;
        }
        let off = valid.iter().filter(|&&i| labels[i] == 0).count() as f64;
        assert!((off - off_total as f64 / 5.0).abs() <= 1.0);
    }
    assert!(seen.iter().all(|&s| s));
    assert_eq!(make_folds(&ds, 5, 9).unwrap().assignments(), plan.assignments());
}

#[test]
fn holdout_is_disjoint_and_seeded() {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: 50, ..Default::default() }, 2).unwrap();
    let (train, valid) = split_holdout(&ds, 0.8, 3).unwrap();
    assert_eq!(train.len() + valid.len(), 50);
    assert!(valid.iter().all(|v| train.iter().all(|t| t.id() != v.id())));
    assert_eq!(split_holdout(&ds, 0.8, 3).unwrap(), (train, valid));
}
