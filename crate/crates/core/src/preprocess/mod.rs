//! Tweet normalization, tokenization, root reduction and index encoding.

mod lemma;
mod porter;

pub use lemma::{lemmatize_verb, VerbLemmatizer};
pub use porter::stem_porter;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::corpus::Dataset;
use crate::{Error, Result};

/// Index reserved for padding.
pub const PAD_INDEX: usize = 0;
/// Index reserved for out-of-vocabulary tokens.
pub const OOV_INDEX: usize = 1;
/// Rendering of [`OOV_INDEX`] when decoding.
pub const OOV_TOKEN: &str = "<oov>";

/// Options for [`clean_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CleanOptions {
    /// Drop `#tag` entirely instead of keeping the tag body.
    pub drop_hashtag_body: bool,
}

/// Normalize a raw tweet: lowercase, drop `@mentions`, turn every character
/// outside `a-z` into a space, collapse whitespace.
pub fn clean(raw: &str) -> String {
    clean_with(raw, CleanOptions::default())
}

pub fn clean_with(raw: &str, options: CleanOptions) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut chars = raw.chars().peekable();
    let mut pending_space = false;
    while let Some(ch) = chars.next() {
        let skip_handle = ch == '@' || (ch == '#' && options.drop_hashtag_body);
        if skip_handle {
            while chars.peek().is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                chars.next();
            }
            pending_space = true;
            continue;
        }
        let mut kept = false;
        for lower in ch.to_lowercase() {
            if lower.is_ascii_lowercase() {
                if pending_space && !out.is_empty() {
                    out.push(' ');
                }
                pending_space = false;
                out.push(lower);
                kept = true;
            }
        }
        if !kept {
            pending_space = true;
        }
    }
    out
}

/// Split a cleaned tweet on whitespace.
pub fn tokenize(cleaned: &str) -> Vec<String> {
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Root reduction applied after tokenization. Stemming and lemmatization are
/// mutually exclusive.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum RootMode {
    #[default]
    None,
    Stem,
    Lemma,
}

impl RootMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RootMode::None => "none",
            RootMode::Stem => "stem",
            RootMode::Lemma => "lemma",
        }
    }
}

impl FromStr for RootMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(RootMode::None),
            "stem" => Ok(RootMode::Stem),
            "lemma" => Ok(RootMode::Lemma),
            other => Err(Error::InvalidArgument(format!(
                "unknown preprocessing mode `{other}` (expected none, stem or lemma)"
            ))),
        }
    }
}

impl fmt::Display for RootMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything needed to turn raw text into tokens.
#[derive(Debug, Clone, Default)]
pub struct Preprocessor {
    pub mode: RootMode,
    pub clean: CleanOptions,
    pub lemmatizer: VerbLemmatizer,
}

impl Preprocessor {
    pub fn new(mode: RootMode) -> Self {
        Preprocessor { mode, ..Default::default() }
    }

    pub fn tokens(&self, raw: &str) -> Vec<String> {
        let tokens = tokenize(&clean_with(raw, self.clean));
        match self.mode {
            RootMode::None => tokens,
            RootMode::Stem => tokens.iter().map(|t| stem_porter(t)).collect(),
            RootMode::Lemma => tokens.iter().map(|t| self.lemmatizer.lemmatize(t)).collect(),
        }
    }

    pub fn corpus(&self, ds: &Dataset) -> Vec<Vec<String>> {
        ds.iter().map(|e| self.tokens(e.raw_text())).collect()
    }
}

/// clean → tokenize → root reduction for every example, in dataset order,
/// using the bundled verb exception table for [`RootMode::Lemma`].
pub fn preprocess_corpus(ds: &Dataset, mode: RootMode) -> Vec<Vec<String>> {
    Preprocessor::new(mode).corpus(ds)
}

/// Word ↔ index maps with [`PAD_INDEX`] and [`OOV_INDEX`] reserved.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    word_to_index: HashMap<String, usize>,
    /// `words[i]` has index `i + 2`.
    words: Vec<String>,
}

impl Vocabulary {
    /// Distinct tokens in first-occurrence order, numbered from 2.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>]) -> Self {
        let mut vocab = Vocabulary::default();
        for tokens in corpus {
            for t in tokens {
                vocab.insert(t.as_ref());
            }
        }
        vocab
    }

    /// Rebuild from words listed in index order (index 2 first).
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for w in words {
            let w = w.into();
            if vocab.word_to_index.contains_key(&w) {
                return Err(Error::Validation(format!("duplicate vocabulary word `{w}`")));
            }
            vocab.insert(&w);
        }
        Ok(vocab)
    }

    fn insert(&mut self, word: &str) {
        if !self.word_to_index.contains_key(word) {
            self.word_to_index.insert(word.to_string(), self.words.len() + 2);
            self.words.push(word.to_string());
        }
    }

    /// Number of real words (reserved indices excluded).
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Rows needed in an embedding table: words plus PAD and OOV.
    pub fn index_space(&self) -> usize {
        self.words.len() + 2
    }

    pub fn index_of(&self, word: &str) -> Option<usize> {
        self.word_to_index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.word_to_index.contains_key(word)
    }

    /// The word at `index`, `None` for reserved or out-of-range indices.
    pub fn word(&self, index: usize) -> Option<&str> {
        index.checked_sub(2).and_then(|i| self.words.get(i)).map(String::as_str)
    }

    /// Words in index order.
    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Map tokens to indices, truncating to `max_len` and zero-padding the tail.
    pub fn encode<S: AsRef<str>>(&self, tokens: &[S], max_len: usize) -> IndexSequence {
        let true_length = tokens.len().min(max_len);
        let mut indices = vec![PAD_INDEX; max_len];
        for (slot, t) in indices.iter_mut().zip(tokens) {
            *slot = self.index_of(t.as_ref()).unwrap_or(OOV_INDEX);
        }
        IndexSequence { indices, true_length }
    }

    /// Decode the first `true_length` indices; OOV becomes [`OOV_TOKEN`].
    pub fn decode(&self, seq: &IndexSequence) -> Vec<String> {
        seq.tokens().iter().map(|&i| self.word(i).unwrap_or(OOV_TOKEN).to_string()).collect()
    }
}

/// [`Vocabulary::build`] under its operation name.
pub fn build_vocabulary<S: AsRef<str>>(corpus: &[Vec<S>]) -> Vocabulary {
    Vocabulary::build(corpus)
}

/// A fixed-length, zero-padded index encoding of one tweet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndexSequence {
    indices: Vec<usize>,
    true_length: usize,
}

impl IndexSequence {
    /// Checks the padding invariant: real positions are non-zero, the tail is PAD.
    pub fn new(indices: Vec<usize>, true_length: usize) -> Result<Self> {
        if true_length > indices.len() {
            return Err(Error::InvalidArgument(format!(
                "true length {true_length} exceeds sequence length {}",
                indices.len()
            )));
        }
        let (head, tail) = indices.split_at(true_length);
        if head.contains(&PAD_INDEX) || tail.iter().any(|&i| i != PAD_INDEX) {
            return Err(Error::InvalidArgument("padding must follow the real tokens".into()));
        }
        Ok(IndexSequence { indices, true_length })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn true_length(&self) -> usize {
        self.true_length
    }

    /// Padded length.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The non-pad prefix.
    pub fn tokens(&self) -> &[usize] {
        &self.indices[..self.true_length]
    }
}

/// [`Vocabulary::encode`] under its operation name.
pub fn encode_padded<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, max_len: usize) -> IndexSequence {
    vocab.encode(tokens, max_len)
}

/// Longest token list in the corpus.
pub fn max_corpus_length<S>(corpus: &[Vec<S>]) -> usize {
    corpus.iter().map(Vec::len).max().unwrap_or(0)
}
