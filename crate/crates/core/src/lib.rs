//! Offensive-language classification for tweets.
//!
//! The crate covers the whole pipeline for the three OLID sub-tasks
//! (offensive or not, targeted or untargeted, target type):
//!
//! * [`corpus`]: OLID TSV ingestion, stratified hold-out and K-fold splits,
//!   minority-class augmentation by random tweet construction.
//! * [`preprocess`]: regex-free tweet cleaning, tokenization, Porter stemming,
//!   rule-based verb lemmatization, vocabulary and padded index encoding.
//! * [`features`]: smooth TF-IDF vectors and batched index encodings.
//! * [`classical`]: logistic regression, primal linear SVM, information-gain
//!   decision trees and random forests over sparse TF-IDF features.
//! * [`neural`]: a small dense-tensor kernel with hand-written forward and
//!   backward passes for CNN, LSTM and GRU classifiers over trainable
//!   look-up embeddings.
//! * [`evaluation`]: confusion counts, macro-F1, accuracy, cross-validation
//!   and grid search.
//! * [`pipeline`], [`persist`] and [`cli`]: end-to-end training/prediction,
//!   the versioned model artifact format and the command-line front end.
//!
//! Runnable walkthroughs for each capability live in `examples/`.

pub mod classical;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod neural;
pub mod persist;
pub mod pipeline;
pub mod preprocess;

pub use error::{Error, Result};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The seeded generator used for every sampling operation in the crate.
pub type Rng = ChaCha8Rng;

/// Build the crate's generator from a user seed.
pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent stream from `(seed, stream)`, e.g. one per forest tree.
pub fn derived_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
