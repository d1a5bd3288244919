use std::fs;
use std::path::{Path, PathBuf};

use offenseval::cli::{run, EXIT_DATA, EXIT_OK, EXIT_USAGE};
use offenseval::corpus::*;
use tempfile::TempDir;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("offenseval").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn write_corpus(dir: &Path, name: &str, n: usize, seed: u64) -> PathBuf {
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: n, ..Default::default() }, seed).unwrap();
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_olid_tsv(&ds, &mut buf).unwrap();
    fs::write(&path, buf).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn train_writes_artifact_deterministically() {
    let dir = TempDir::new().unwrap();
    let data = write_corpus(dir.path(), "train.tsv", 10, 0);
    let (a, b) = (dir.path().join("a.ofns"), dir.path().join("b.ofns"));
    for out in [&a, &b] {
        let r = cli(&["train", "--task", "a", "--model", "logreg", "--data", s(&data), "--out", s(out), "--seed", "3"]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        assert!(r.stdout.contains("train_accuracy="));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn usage_errors_leave_no_files() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("m.ofns");
    let r = cli(&["train", "--task", "a", "--model", "logreg", "--out", s(&out)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(!out.exists());

    let data = write_corpus(dir.path(), "train.tsv", 20, 0);
    let config = dir.path().join("bad.conf");
    fs::write(&config, "nonsense_key = 1\n").unwrap();
    let r =
        cli(&["train", "--task", "a", "--model", "svm", "--data", s(&data), "--config", s(&config), "--out", s(&out)]);
    assert_eq!(r.code, EXIT_USAGE, "{}", r.stderr);

    fs::write(&config, "c = 0.1, 1\n").unwrap();
    let r =
        cli(&["train", "--task", "a", "--model", "svm", "--data", s(&data), "--config", s(&config), "--out", s(&out)]);
    assert_eq!(r.code, EXIT_USAGE);

    let r = cli(&[
        "train",
        "--task",
        "a",
        "--model",
        "svm",
        "--data",
        s(&dir.path().join("missing.tsv")),
        "--out",
        s(&out),
    ]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(!out.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 2);
}

#[test]
fn cv_prints_folds_and_mean_and_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let data = write_corpus(dir.path(), "train.tsv", 100, 1);
    let reports = [dir.path().join("r1.txt"), dir.path().join("r2.txt")];
    let mut stdouts = Vec::new();
    for rep in &reports {
        let r = cli(&[
            "cv",
            "--task",
            "a",
            "--model",
            "svm",
            "--data",
            s(&data),
            "--k",
            "5",
            "--seed",
            "7",
            "--report",
            s(rep),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        stdouts.push(r.stdout);
    }
    assert_eq!(fs::read(&reports[0]).unwrap(), fs::read(&reports[1]).unwrap());
    assert_eq!(stdouts[0], stdouts[1]);
    let lines: Vec<&str> = stdouts[0].lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[5].starts_with("mean:"));

    let report = fs::read_to_string(&reports[0]).unwrap();
    let value = |key: &str| -> f64 {
        report.lines().find_map(|l| l.strip_prefix(&format!("{key} = "))).unwrap().parse().unwrap()
    };
    let folds: f64 = (1..=5).map(|i| value(&format!("fold.{i}.macro_f1"))).sum();
    assert!((value("mean.macro_f1") - folds / 5.0).abs() < 1e-12);
}

#[test]
fn gridsearch_expands_in_file_order_and_saves_best() {
    let dir = TempDir::new().unwrap();
    let data = write_corpus(dir.path(), "train.tsv", 80, 2);
    let config = dir.path().join("grid.conf");
    fs::write(&config, "# two by two\nl2 = 0.0001, 0.01\nepochs = 5, 10\n").unwrap();
    let mut runs = Vec::new();
    let rep = dir.path().join("r.txt");
    let out = dir.path().join("best.ofns");
    for _ in 0..2 {
        let r = cli(&[
            "gridsearch",
            "--task",
            "a",
            "--model",
            "logreg",
            "--data",
            s(&data),
            "--config",
            s(&config),
            "--k",
            "3",
            "--seed",
            "5",
            "--report",
            s(&rep),
            "--out",
            s(&out),
        ]);
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        runs.push((r.stdout, fs::read(&rep).unwrap(), fs::read(&out).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);

    let stdout = &runs[0].0;
    let configs: Vec<&str> = stdout.lines().filter(|l| l.starts_with("config ")).collect();
    assert_eq!(configs.len(), 4);
    assert!(configs[0].contains("l2=0.0001") && configs[0].contains("epochs=5"));
    assert!(configs[1].contains("l2=0.0001") && configs[1].contains("epochs=10"));
    let score = |l: &str| -> f64 { l.rsplit("mean_macro_f1=").next().unwrap().parse().unwrap() };
    let best = stdout.lines().find(|l| l.starts_with("best:")).unwrap();
    assert_eq!(score(best), configs.iter().map(|l| score(l)).fold(f64::MIN, f64::max));
}

#[test]
fn singleton_grid_matches_cv() {
    let dir = TempDir::new().unwrap();
    let data = write_corpus(dir.path(), "train.tsv", 60, 3);
    let config = dir.path().join("one.conf");
    fs::write(&config, "c = 1\n").unwrap();
    let common = ["--task", "a", "--model", "svm", "--data", s(&data), "--config", s(&config), "--seed", "2"];
    let (g, c) = (dir.path().join("g.txt"), dir.path().join("c.txt"));
    let grid: Vec<&str> = ["gridsearch"].into_iter().chain(common).chain(["--report", s(&g)]).collect();
    let cv: Vec<&str> = ["cv"].into_iter().chain(common).chain(["--report", s(&c)]).collect();
    assert_eq!(cli(&grid).code, EXIT_OK);
    assert_eq!(cli(&cv).code, EXIT_OK);
    let find = |p: &Path, key: &str| -> String {
        fs::read_to_string(p).unwrap().lines().find_map(|l| l.strip_prefix(key).map(str::to_string)).unwrap()
    };
    assert_eq!(find(&g, "best.mean_macro_f1 = "), find(&c, "mean.macro_f1 = "));
}

#[test]
fn predict_after_reload_matches_and_evaluates() {
    let dir = TempDir::new().unwrap();
    let train = write_corpus(dir.path(), "train.tsv", 200, 4);
    let test = write_corpus(dir.path(), "test.tsv", 50, 5);
    let model = dir.path().join("m.ofns");
    let r = cli(&[
        "train",
        "--task",
        "a",
        "--model",
        "forest",
        "--data",
        s(&train),
        "--out",
        s(&model),
        "--config",
        s(&{
            let c = dir.path().join("f.conf");
            fs::write(&c, "n_trees = 10\n").unwrap();
            c
        }),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);

    let pred = dir.path().join("pred.csv");
    assert_eq!(cli(&["predict", "--model", s(&model), "--data", s(&test), "--out", s(&pred)]).code, EXIT_OK);
    let csv = fs::read_to_string(&pred).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows[0], "id,label");
    assert_eq!(rows.len(), 51);

    let ds = load_olid_tsv(&test, Task::A).unwrap();
    let direct = offenseval::persist::load_model(&fs::read(&model).unwrap()).unwrap().predict_labels(&ds).unwrap();
    for ((row, e), l) in rows[1..].iter().zip(ds.iter()).zip(direct) {
        assert_eq!(*row, format!("{},{l}", e.id()));
    }

    let gold = dir.path().join("gold.csv");
    let gold_rows: String = ds.iter().map(|e| format!("{},{}\n", e.id(), e.label(Task::A).unwrap())).collect();
    fs::write(&gold, format!("id,label\n{gold_rows}")).unwrap();
    let r = cli(&["evaluate", "--pred", s(&pred), "--gold", s(&gold)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.contains("n=50"));
    let r = cli(&["evaluate", "--pred", s(&gold), "--gold", s(&gold)]);
    assert!(r.stdout.starts_with("macro_f1=1.0000"), "{}", r.stdout);
}

#[test]
fn predict_on_unlabeled_rows() {
    let dir = TempDir::new().unwrap();
    let train = write_corpus(dir.path(), "train.tsv", 40, 6);
    let model = dir.path().join("m.ofns");
    assert_eq!(
        cli(&["train", "--task", "a", "--model", "logreg", "--data", s(&train), "--out", s(&model)]).code,
        EXIT_OK
    );
    let test = dir.path().join("test.tsv");
    fs::write(&test, "id\ttweet\n1\t@USER you are a disgrace\n2\tnever seen words\n3\tgood morning URL\n").unwrap();
    let pred = dir.path().join("p.csv");
    assert_eq!(cli(&["predict", "--model", s(&model), "--data", s(&test), "--out", s(&pred)]).code, EXIT_OK);
    let csv = fs::read_to_string(&pred).unwrap();
    let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["1", "2", "3"]);

    let mut bytes = fs::read(&model).unwrap();
    bytes[4] = 9;
    fs::write(&model, bytes).unwrap();
    let r = cli(&["predict", "--model", s(&model), "--data", s(&test), "--out", s(&dir.path().join("q.csv"))]);
    assert_eq!(r.code, EXIT_DATA);
    assert!(r.stderr.contains("newer"));
    assert!(!dir.path().join("q.csv").exists());
}

#[test]
fn evaluate_hand_fixture_and_id_mismatch() {
    let dir = TempDir::new().unwrap();
    let gold = dir.path().join("gold.csv");
    let pred = dir.path().join("pred.csv");
    let report = dir.path().join("r.txt");
    fs::write(&gold, "id,label\n1,OFF\n2,NOT\n3,OFF\n4,NOT\n").unwrap();
    fs::write(&pred, "id,label\n4,NOT\n3,OFF\n2,OFF\n1,OFF\n").unwrap();
    let r = cli(&["evaluate", "--pred", s(&pred), "--gold", s(&gold), "--report", s(&report)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stdout.starts_with("macro_f1=0.7333"));
    let text = fs::read_to_string(&report).unwrap();
    let f1: f64 = text.lines().find_map(|l| l.strip_prefix("macro_f1 = ")).unwrap().parse().unwrap();
    assert!((f1 - 11.0 / 15.0).abs() < 1e-12);

    fs::write(&pred, "id,label\n5,NOT\n6,OFF\n7,OFF\n8,OFF\n").unwrap();
    assert_eq!(cli(&["evaluate", "--pred", s(&pred), "--gold", s(&gold)]).code, EXIT_DATA);
    fs::write(&pred, "id,label\n1,NOT\n1,OFF\n3,OFF\n4,OFF\n").unwrap();
    assert_eq!(cli(&["evaluate", "--pred", s(&pred), "--gold", s(&gold)]).code, EXIT_DATA);
}

#[test]
fn augmented_cv_on_task_b() {
    let dir = TempDir::new().unwrap();
    let data = write_corpus(dir.path(), "train.tsv", 300, 8);
    let r = cli(&["cv", "--task", "b", "--model", "logreg", "--data", s(&data), "--augment", "--k", "3"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert_eq!(r.stdout.lines().count(), 4);
}
