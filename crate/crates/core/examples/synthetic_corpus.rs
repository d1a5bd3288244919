//! Write a synthetic OLID-style training file.
//!
//! ```text
//! cargo run --example synthetic_corpus -- 2000 train.tsv
//! ```
//!
//! Without a path the TSV goes to stdout.

use std::fs::File;
use std::io::{self, BufWriter};

use offenseval::corpus::{synthetic_corpus, write_olid_tsv, Label, SyntheticConfig, Task};

fn main() -> offenseval::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(500), |a| a.parse()).expect("size must be an integer");
    let ds = synthetic_corpus(&SyntheticConfig { n_examples: n, ..Default::default() }, 7)?;

    let b = ds.restrict_to(Task::B);
    let unt = b.iter().filter(|e| e.label(Task::B) == Some(Label::Unt)).count();
    eprintln!("{} tweets, {} offensive, {unt} of them untargeted", ds.len(), b.len());

    match args.next() {
        Some(path) => write_olid_tsv(&ds, BufWriter::new(File::create(path)?)),
        None => write_olid_tsv(&ds, io::stdout().lock()),
    }
}
