//! Tweet datasets in the OLID layout, stratified splitting and augmentation.

mod synthetic;

pub use synthetic::{synthetic_corpus, SyntheticConfig};

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::{seeded_rng, Error, Result};

const LABELED_HEADER: [&str; 5] = ["id", "tweet", "subtask_a", "subtask_b", "subtask_c"];
const UNLABELED_HEADER: [&str; 2] = ["id", "tweet"];

/// Prefix carried by the ids of synthetic examples.
pub const AUGMENTED_ID_PREFIX: &str = "AUG-";

/// One of the three OLID sub-tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Task {
    /// Offensive (OFF) vs. not offensive (NOT).
    A,
    /// Targeted insult (TIN) vs. untargeted (UNT).
    B,
    /// Target type: individual (IND), group (GRP), other (OTH).
    C,
}

impl Task {
    /// The task's classes in class-index order.
    pub fn classes(self) -> &'static [Label] {
        match self {
            Task::A => &[Label::Off, Label::Not],
            Task::B => &[Label::Tin, Label::Unt],
            Task::C => &[Label::Ind, Label::Grp, Label::Oth],
        }
    }

    pub fn n_classes(self) -> usize {
        self.classes().len()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Task::A => "a",
            Task::B => "b",
            Task::C => "c",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Task::A),
            "b" => Ok(Task::B),
            "c" => Ok(Task::C),
            other => Err(Error::InvalidArgument(format!("unknown task `{other}` (expected a, b or c)"))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Any OLID label across the three sub-tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Off,
    Not,
    Tin,
    Unt,
    Ind,
    Grp,
    Oth,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Off => "OFF",
            Label::Not => "NOT",
            Label::Tin => "TIN",
            Label::Unt => "UNT",
            Label::Ind => "IND",
            Label::Grp => "GRP",
            Label::Oth => "OTH",
        }
    }

    /// The sub-task this label belongs to.
    pub fn task(self) -> Task {
        match self {
            Label::Off | Label::Not => Task::A,
            Label::Tin | Label::Unt => Task::B,
            Label::Ind | Label::Grp | Label::Oth => Task::C,
        }
    }

    /// Position of the label in its task's class list.
    pub fn index(self) -> usize {
        self.task().classes().iter().position(|&l| l == self).expect("label belongs to its own task")
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "OFF" => Label::Off,
            "NOT" => Label::Not,
            "TIN" => Label::Tin,
            "UNT" => Label::Unt,
            "IND" => Label::Ind,
            "GRP" => Label::Grp,
            "OTH" => Label::Oth,
            other => return Err(Error::Validation(format!("unknown label `{other}`"))),
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A tweet with its (optional) hierarchical annotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    id: String,
    raw_text: String,
    label_a: Option<Label>,
    label_b: Option<Label>,
    label_c: Option<Label>,
}

impl Example {
    /// An example without labels, as found in test files.
    pub fn unlabeled(id: impl Into<String>, raw_text: impl Into<String>) -> Result<Self> {
        Self::labeled(id, raw_text, None, None, None)
    }

    /// Build an example, checking that each label belongs to its sub-task and
    /// that the annotation hierarchy holds (B only under OFF, C only under TIN).
    pub fn labeled(
        id: impl Into<String>,
        raw_text: impl Into<String>,
        label_a: Option<Label>,
        label_b: Option<Label>,
        label_c: Option<Label>,
    ) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::Validation("empty example id".into()));
        }
        for (label, task) in [(label_a, Task::A), (label_b, Task::B), (label_c, Task::C)] {
            if let Some(l) = label {
                if l.task() != task {
                    return Err(Error::Validation(format!("example {id}: label {l} is not a sub-task {task} label")));
                }
            }
        }
        if label_b.is_some() && label_a != Some(Label::Off) {
            return Err(Error::Validation(format!("example {id}: sub-task b label requires subtask_a = OFF")));
        }
        if label_c.is_some() && label_b != Some(Label::Tin) {
            return Err(Error::Validation(format!("example {id}: sub-task c label requires subtask_b = TIN")));
        }
        Ok(Example { id, raw_text: raw_text.into(), label_a, label_b, label_c })
    }

    /// A labeled example for `task`, filling in the parent labels the hierarchy implies.
    pub fn for_task(id: impl Into<String>, raw_text: impl Into<String>, label: Label) -> Result<Self> {
        let (a, b, c) = match label.task() {
            Task::A => (Some(label), None, None),
            Task::B => (Some(Label::Off), Some(label), None),
            Task::C => (Some(Label::Off), Some(Label::Tin), Some(label)),
        };
        Self::labeled(id, raw_text, a, b, c)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    pub fn label(&self, task: Task) -> Option<Label> {
        match task {
            Task::A => self.label_a,
            Task::B => self.label_b,
            Task::C => self.label_c,
        }
    }

    pub fn is_augmented(&self) -> bool {
        self.id.starts_with(AUGMENTED_ID_PREFIX)
    }
}

/// An ordered list of examples for one sub-task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    task: Task,
    examples: Vec<Example>,
}

impl Dataset {
    /// Ids must be unique. Labels are not required (prediction sets).
    pub fn new(task: Task, examples: Vec<Example>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(examples.len());
        for ex in &examples {
            if !seen.insert(ex.id.as_str()) {
                return Err(Error::Validation(format!("duplicate example id `{}`", ex.id)));
            }
        }
        Ok(Dataset { task, examples })
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn examples(&self) -> &[Example] {
        &self.examples
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Example> {
        self.examples.iter()
    }

    /// True when every example carries a label for the dataset's task.
    pub fn is_labeled(&self) -> bool {
        self.examples.iter().all(|e| e.label(self.task).is_some())
    }

    /// Labels for the dataset's task; fails on the first unlabeled example.
    pub fn labels(&self) -> Result<Vec<Label>> {
        self.examples
            .iter()
            .map(|e| {
                e.label(self.task)
                    .ok_or_else(|| Error::Validation(format!("example {} has no sub-task {} label", e.id, self.task)))
            })
            .collect()
    }

    /// Labels as class indices into `task().classes()`.
    pub fn class_indices(&self) -> Result<Vec<usize>> {
        Ok(self.labels()?.into_iter().map(Label::index).collect())
    }

    /// Per-class example counts in class-index order.
    pub fn class_counts(&self) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.task.n_classes()];
        for c in self.class_indices()? {
            counts[c] += 1;
        }
        Ok(counts)
    }

    /// The examples annotated for `task`, as a dataset for that task.
    pub fn restrict_to(&self, task: Task) -> Dataset {
        Dataset { task, examples: self.examples.iter().filter(|e| e.label(task).is_some()).cloned().collect() }
    }

    /// The examples at `indices`, in the order given.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset { task: self.task, examples: indices.iter().map(|&i| self.examples[i].clone()).collect() }
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Example;
    type IntoIter = std::slice::Iter<'a, Example>;

    fn into_iter(self) -> Self::IntoIter {
        self.examples.iter()
    }
}

/// Load an OLID training/trial TSV (5 columns) or an unlabeled test TSV
/// (`id`, `tweet`). Labeled files are filtered to rows annotated for `task`.
pub fn load_olid_tsv(path: impl AsRef<Path>, task: Task) -> Result<Dataset> {
    let file = File::open(path.as_ref())?;
    read_olid_tsv(BufReader::new(file), task)
}

/// Write `ds` in the labeled five-column OLID layout, `NULL` for absent labels.
pub fn write_olid_tsv<W: Write>(ds: &Dataset, mut out: W) -> Result<()> {
    writeln!(out, "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c")?;
    for e in ds {
        if e.raw_text().contains(['\t', '\n', '\r']) || e.id().contains(['\t', '\n', '\r']) {
            return Err(Error::Validation(format!("example `{}` contains a tab or line break", e.id())));
        }
        let label = |t: Task| e.label(t).map_or("NULL", Label::as_str);
        writeln!(out, "{}\t{}\t{}\t{}\t{}", e.id(), e.raw_text(), label(Task::A), label(Task::B), label(Task::C))?;
    }
    Ok(())
}

/// [`load_olid_tsv`] over any reader.
pub fn read_olid_tsv<R: BufRead>(reader: R, task: Task) -> Result<Dataset> {
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, message: "empty file, expected a header".into() }),
    };
    let header: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    let labeled = if header == LABELED_HEADER {
        true
    } else if header == UNLABELED_HEADER {
        false
    } else {
        return Err(Error::Parse { line: 1, message: format!("unexpected header {:?}", header.join("\\t")) });
    };
    let n_columns = header.len();

    let mut examples = Vec::new();
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != n_columns {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {n_columns} tab-separated columns, found {}", cols.len()),
            });
        }
        let example = if labeled {
            let parse = |s: &str| -> Result<Option<Label>> {
                if s == "NULL" {
                    Ok(None)
                } else {
                    s.parse().map(Some)
                }
            };
            let with_line = |e: Error| match e {
                Error::Validation(m) => Error::Validation(format!("line {line_no}: {m}")),
                other => other,
            };
            let a = parse(cols[2]).map_err(with_line)?;
            let b = parse(cols[3]).map_err(with_line)?;
            let c = parse(cols[4]).map_err(with_line)?;
            Example::labeled(cols[0], cols[1], a, b, c).map_err(with_line)?
        } else {
            Example::unlabeled(cols[0], cols[1]).map_err(|e| Error::Validation(format!("line {line_no}: {e}")))?
        };
        if !labeled || example.label(task).is_some() {
            examples.push(example);
        }
    }
    Dataset::new(task, examples)
}

/// Stratified hold-out split into `(train, validation)`.
///
/// Each class contributes `floor` or `ceil` of its proportional share to the
/// training side, with leftover slots handed out by largest remainder so the
/// training side holds `round(train_fraction * n)` examples. Both outputs keep
/// the original example order.
pub fn split_holdout(ds: &Dataset, train_fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("train_fraction must lie in (0, 1), got {train_fraction}")));
    }
    let by_class = indices_by_class(ds)?;
    for (c, members) in by_class.iter().enumerate() {
        if members.len() == 1 {
            return Err(Error::Validation(format!(
                "class {} has a single example, cannot stratify",
                ds.task.classes()[c]
            )));
        }
    }

    let target_total = (train_fraction * ds.len() as f64).round() as usize;
    let shares: Vec<f64> = by_class.iter().map(|m| train_fraction * m.len() as f64).collect();
    let mut take: Vec<usize> = shares.iter().map(|s| s.floor() as usize).collect();
    let mut remaining = target_total.saturating_sub(take.iter().sum());
    let mut order: Vec<usize> = (0..shares.len()).collect();
    // Largest fractional part first; class index breaks ties.
    order.sort_by(|&x, &y| {
        let fx = shares[x] - shares[x].floor();
        let fy = shares[y] - shares[y].floor();
        fy.total_cmp(&fx).then(x.cmp(&y))
    });
    for &c in &order {
        if remaining == 0 {
            break;
        }
        if shares[c] > shares[c].floor() && take[c] < by_class[c].len() {
            take[c] += 1;
            remaining -= 1;
        }
    }

    let mut rng = seeded_rng(seed);
    let mut in_train = vec![false; ds.len()];
    for (members, &n_take) in by_class.iter().zip(&take) {
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        for &i in &shuffled[..n_take] {
            in_train[i] = true;
        }
    }
    let (train, valid): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| in_train[i]);
    Ok((ds.subset(&train), ds.subset(&valid)))
}

/// Fold assignment for K-fold cross-validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    k: usize,
    assignments: Vec<usize>,
}

impl FoldPlan {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Fold index of every example, in dataset order.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// `(training indices, validation indices)` for `fold`, both ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.assignments.len()).partition(|&i| self.assignments[i] != fold)
    }
}

/// Stratified K-fold assignment.
///
/// Each class's members are shuffled and the class lists are concatenated in
/// class order; position `p` of the concatenation goes to fold `p mod k`. This
/// keeps both total fold sizes and per-class fold counts within one of each other.
pub fn make_folds(ds: &Dataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if k > ds.len() {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the number of examples ({})", ds.len())));
    }
    let by_class = indices_by_class(ds)?;
    let mut rng = seeded_rng(seed);
    let mut assignments = vec![0; ds.len()];
    let mut position = 0;
    for members in by_class {
        let mut shuffled = members;
        shuffled.shuffle(&mut rng);
        for i in shuffled {
            assignments[i] = position % k;
            position += 1;
        }
    }
    Ok(FoldPlan { k, assignments })
}

fn indices_by_class(ds: &Dataset) -> Result<Vec<Vec<usize>>> {
    let mut by_class = vec![Vec::new(); ds.task.n_classes()];
    for (i, c) in ds.class_indices()?.into_iter().enumerate() {
        by_class[c].push(i);
    }
    Ok(by_class)
}

/// Grow the minority class with synthetic tweets until
/// `minority_count >= target_ratio * majority_count`.
///
/// Sampling recipe, all draws from one generator seeded with `seed`: for each
/// synthetic tweet draw a minority example uniformly and take its whitespace
/// token count as the length `L`, then draw `L` words uniformly (with
/// replacement) from the pooled whitespace tokens of all minority raw texts.
/// Originals are kept untouched as a prefix of the output.
pub fn augment_minority(ds: &Dataset, target_ratio: f64, seed: u64) -> Result<Dataset> {
    if !(target_ratio > 0.0 && target_ratio <= 1.0) {
        return Err(Error::InvalidArgument(format!("target_ratio must lie in (0, 1], got {target_ratio}")));
    }
    let counts = ds.class_counts()?;
    let min_count = *counts.iter().min().expect("tasks have at least two classes");
    let max_count = *counts.iter().max().expect("tasks have at least two classes");
    if counts.iter().filter(|&&c| c == min_count).count() != 1 {
        return Err(Error::Validation(format!("no unique minority class (class counts {counts:?})")));
    }
    if min_count == 0 {
        return Err(Error::Validation("minority class is empty, nothing to sample from".into()));
    }
    let minority = counts.iter().position(|&c| c == min_count).expect("minimum exists");
    let minority_label = ds.task.classes()[minority];

    let minority_texts: Vec<&str> =
        ds.iter().filter(|e| e.label(ds.task) == Some(minority_label)).map(|e| e.raw_text()).collect();
    let lengths: Vec<usize> = minority_texts.iter().map(|t| t.split_whitespace().count()).collect();
    let pool: Vec<&str> = minority_texts.iter().flat_map(|t| t.split_whitespace()).collect();

    let required = (target_ratio * max_count as f64).ceil() as usize;
    let n_new = required.saturating_sub(min_count);
    if n_new > 0 && pool.is_empty() {
        return Err(Error::Validation("minority tweets contain no words to sample".into()));
    }

    let mut rng = seeded_rng(seed);
    let mut examples = ds.examples.clone();
    let mut taken: HashSet<String> = examples.iter().map(|e| e.id.clone()).collect();
    let mut serial = 0usize;
    for _ in 0..n_new {
        let len = lengths[rng.random_range(0..lengths.len())];
        let words: Vec<&str> = (0..len).map(|_| pool[rng.random_range(0..pool.len())]).collect();
        let id = loop {
            let candidate = format!("{AUGMENTED_ID_PREFIX}{serial}");
            serial += 1;
            if taken.insert(candidate.clone()) {
                break candidate;
            }
        };
        examples.push(Example::for_task(id, words.join(" "), minority_label)?);
    }
    Dataset::new(ds.task, examples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(task_labels: &[(Label, &str)]) -> Dataset {
        let task = task_labels[0].0.task();
        let examples = task_labels
            .iter()
            .enumerate()
            .map(|(i, (l, t))| Example::for_task(format!("{i}"), *t, *l).unwrap())
            .collect();
        Dataset::new(task, examples).unwrap()
    }

    const HEADER: &str = "id\ttweet\tsubtask_a\tsubtask_b\tsubtask_c\n";

    #[test]
    fn task_b_row_kept_with_its_label() {
        let tsv = format!("{HEADER}86426\t@USER she should ask a few native Americans...\tOFF\tUNT\tNULL\n");
        let ds = read_olid_tsv(tsv.as_bytes(), Task::B).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.examples()[0].label(Task::B), Some(Label::Unt));
        assert_eq!(ds.examples()[0].id(), "86426");
    }

    #[test]
    fn not_offensive_rows_are_dropped_for_task_b() {
        let tsv = format!("{HEADER}1\thello\tNOT\tNULL\tNULL\n2\tidiot\tOFF\tTIN\tIND\n");
        let ds = read_olid_tsv(tsv.as_bytes(), Task::B).unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.examples()[0].id(), "2");
        let all = read_olid_tsv(tsv.as_bytes(), Task::A).unwrap();
        assert_eq!(all.len(), 2);
    }

    #[test]
    fn wrong_column_count_names_the_line() {
        let tsv = format!("{HEADER}1\thello\tNOT\tNULL\tNULL\n2\tbad\tNOT\tNULL\n");
        match read_olid_tsv(tsv.as_bytes(), Task::A) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_label_is_a_validation_error() {
        let tsv = format!("{HEADER}1\thello\tMEAN\tNULL\tNULL\n");
        assert!(matches!(read_olid_tsv(tsv.as_bytes(), Task::A), Err(Error::Validation(_))));
    }

    #[test]
    fn hierarchy_violation_is_rejected() {
        let tsv = format!("{HEADER}1\thello\tNOT\tTIN\tNULL\n");
        assert!(matches!(read_olid_tsv(tsv.as_bytes(), Task::A), Err(Error::Validation(_))));
    }

    #[test]
    fn unlabeled_test_file_keeps_every_row() {
        let tsv = "id\ttweet\n1\tone\n2\ttwo\n3\tthree\n";
        let ds = read_olid_tsv(tsv.as_bytes(), Task::C).unwrap();
        assert_eq!(ds.len(), 3);
        assert!(!ds.is_labeled());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let a = Example::unlabeled("x", "a").unwrap();
        assert!(Dataset::new(Task::A, vec![a.clone(), a]).is_err());
    }

    #[test]
    fn holdout_stratifies_six_four() {
        let mut rows = vec![(Label::Off, "o"); 6];
        rows.extend(vec![(Label::Not, "n"); 4]);
        let ds = toy(&rows);
        let (train, valid) = split_holdout(&ds, 0.5, 7).unwrap();
        assert_eq!(train.class_counts().unwrap(), vec![3, 2]);
        assert_eq!(valid.class_counts().unwrap(), vec![3, 2]);
        assert_eq!(split_holdout(&ds, 0.5, 7).unwrap().0, train);
    }

    #[test]
    fn holdout_sizes_eighty_twenty() {
        let rows: Vec<(Label, &str)> =
            (0..100).map(|i| (if i % 3 == 0 { Label::Off } else { Label::Not }, "t")).collect();
        let (train, valid) = split_holdout(&toy(&rows), 0.8, 1).unwrap();
        assert_eq!((train.len(), valid.len()), (80, 20));
    }

    #[test]
    fn holdout_rejects_singleton_class() {
        let ds = toy(&[(Label::Off, "a"), (Label::Not, "b"), (Label::Not, "c")]);
        assert!(split_holdout(&ds, 0.5, 0).is_err());
    }

    #[test]
    fn folds_of_ten_and_eleven() {
        let rows: Vec<(Label, &str)> = (0..10).map(|i| (if i < 4 { Label::Off } else { Label::Not }, "t")).collect();
        assert_eq!(make_folds(&toy(&rows), 5, 3).unwrap().fold_sizes(), vec![2; 5]);
        let rows: Vec<(Label, &str)> = (0..11).map(|i| (if i < 4 { Label::Off } else { Label::Not }, "t")).collect();
        let mut sizes = make_folds(&toy(&rows), 5, 3).unwrap().fold_sizes();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(sizes, vec![3, 2, 2, 2, 2]);
    }

    #[test]
    fn folds_reject_bad_k() {
        let ds = toy(&[(Label::Off, "a"), (Label::Not, "b"), (Label::Not, "c")]);
        assert!(make_folds(&ds, 1, 0).is_err());
        assert!(make_folds(&ds, 4, 0).is_err());
    }

    #[test]
    fn augmentation_balances_five_against_twenty() {
        let mut rows = vec![(Label::Tin, "you are a fool"); 20];
        rows.extend(vec![(Label::Unt, "what a mess this is"); 5]);
        let ds = toy(&rows);
        let out = augment_minority(&ds, 1.0, 11).unwrap();
        assert_eq!(out.len(), 40);
        assert_eq!(&out.examples()[..25], ds.examples());
        assert!(out.examples()[25..].iter().all(|e| e.is_augmented() && e.label(Task::B) == Some(Label::Unt)));
        assert_eq!(out.class_counts().unwrap(), vec![20, 20]);
    }

    #[test]
    fn augmentation_requires_a_unique_minority() {
        let ds = toy(&[(Label::Tin, "a b"), (Label::Unt, "c d")]);
        assert!(augment_minority(&ds, 1.0, 0).is_err());
    }
}
