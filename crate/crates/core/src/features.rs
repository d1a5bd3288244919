//! Smooth TF-IDF vectors and batched index encodings.
//!
//! `idf(t) = ln(n / (df(t) + 1))` with `n` the number of fitted tweets and
//! `df(t)` the number of tweets containing `t`; a tweet's value for `t` is
//! the raw count of `t` in the tweet times `idf(t)`. Terms present in every
//! tweet get a negative weight, which is kept.

use std::collections::{BTreeMap, HashMap};

use crate::preprocess::{IndexSequence, Vocabulary};
use crate::{Error, Result};

/// A sparse row: `(column, value)` pairs with strictly increasing columns and
/// no stored zeros.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseVector {
    pairs: Vec<(usize, f64)>,
}

impl SparseVector {
    /// Sorts by column, drops zeros, rejects duplicate columns.
    pub fn new(mut pairs: Vec<(usize, f64)>) -> Result<Self> {
        pairs.retain(|&(_, v)| v != 0.0);
        pairs.sort_by_key(|&(c, _)| c);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("duplicate column in sparse vector".into()));
        }
        Ok(SparseVector { pairs })
    }

    /// Build from a dense slice, skipping zeros.
    pub fn from_dense(values: &[f64]) -> Self {
        SparseVector { pairs: values.iter().copied().enumerate().filter(|&(_, v)| v != 0.0).collect() }
    }

    pub fn pairs(&self) -> &[(usize, f64)] {
        &self.pairs
    }

    pub fn nnz(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Value at `column`, zero when absent.
    pub fn get(&self, column: usize) -> f64 {
        self.pairs.binary_search_by_key(&column, |&(c, _)| c).map(|i| self.pairs[i].1).unwrap_or(0.0)
    }

    /// Largest stored column plus one (0 for the empty vector).
    pub fn min_dim(&self) -> usize {
        self.pairs.last().map_or(0, |&(c, _)| c + 1)
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.pairs.iter().map(|&(c, v)| v * dense[c]).sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for &(c, v) in &self.pairs {
            out[c] = v;
        }
        out
    }
}

/// A fitted TF-IDF feature space.
#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    columns: HashMap<String, usize>,
    terms: Vec<String>,
    df: Vec<u64>,
    n_docs: u64,
    idf: Vec<f64>,
}

impl TfidfModel {
    /// One column per distinct term in first-occurrence order.
    pub fn fit<S: AsRef<str>>(corpus: &[Vec<S>]) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::InvalidArgument("cannot fit TF-IDF on an empty corpus".into()));
        }
        let mut columns: HashMap<String, usize> = HashMap::new();
        let mut terms = Vec::new();
        let mut df: Vec<u64> = Vec::new();
        let mut last_doc: Vec<usize> = Vec::new();
        for (doc, tokens) in corpus.iter().enumerate() {
            for t in tokens {
                let t = t.as_ref();
                let col = match columns.get(t) {
                    Some(&c) => c,
                    None => {
                        let c = terms.len();
                        columns.insert(t.to_string(), c);
                        terms.push(t.to_string());
                        df.push(0);
                        last_doc.push(usize::MAX);
                        c
                    }
                };
                if last_doc[col] != doc {
                    last_doc[col] = doc;
                    df[col] += 1;
                }
            }
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("corpus has no tokens, no TF-IDF features".into()));
        }
        Self::from_parts(terms, df, corpus.len() as u64)
    }

    /// Rebuild a model from its terms, document frequencies and corpus size.
    pub fn from_parts(terms: Vec<String>, df: Vec<u64>, n_docs: u64) -> Result<Self> {
        if terms.len() != df.len() {
            return Err(Error::InvalidArgument("terms and df lengths differ".into()));
        }
        if let Some(bad) = df.iter().position(|&d| d == 0 || d > n_docs) {
            return Err(Error::InvalidArgument(format!(
                "document frequency {} of `{}` outside [1, {n_docs}]",
                df[bad], terms[bad]
            )));
        }
        let mut columns = HashMap::with_capacity(terms.len());
        for (i, t) in terms.iter().enumerate() {
            if columns.insert(t.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate term `{t}`")));
            }
        }
        let idf = df.iter().map(|&d| idf(n_docs, d)).collect();
        Ok(TfidfModel { columns, terms, df, n_docs, idf })
    }

    /// Sparse TF-IDF row for one token list; unseen terms are ignored.
    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, u64> = BTreeMap::new();
        for t in tokens {
            if let Some(&c) = self.columns.get(t.as_ref()) {
                *counts.entry(c).or_default() += 1;
            }
        }
        SparseVector {
            pairs: counts.into_iter().map(|(c, n)| (c, n as f64 * self.idf[c])).filter(|&(_, v)| v != 0.0).collect(),
        }
    }

    pub fn transform_batch<S: AsRef<str>>(&self, corpus: &[Vec<S>]) -> Vec<SparseVector> {
        corpus.iter().map(|t| self.transform(t)).collect()
    }

    pub fn n_features(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> u64 {
        self.n_docs
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn column(&self, term: &str) -> Option<usize> {
        self.columns.get(term).copied()
    }

    pub fn df(&self) -> &[u64] {
        &self.df
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }
}

fn idf(n_docs: u64, df: u64) -> f64 {
    (n_docs as f64 / (df as f64 + 1.0)).ln()
}

/// [`TfidfModel::fit`] under its operation name.
pub fn fit_tfidf<S: AsRef<str>>(corpus: &[Vec<S>]) -> Result<TfidfModel> {
    TfidfModel::fit(corpus)
}

/// [`TfidfModel::transform`] under its operation name.
pub fn transform_tfidf<S: AsRef<str>>(model: &TfidfModel, tokens: &[S]) -> SparseVector {
    model.transform(tokens)
}

/// Encode each token list with [`Vocabulary::encode`], order preserved.
pub fn encode_batch<S: AsRef<str>>(corpus: &[Vec<S>], vocab: &Vocabulary, max_len: usize) -> Vec<IndexSequence> {
    corpus.iter().map(|t| vocab.encode(t, max_len)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus() -> Vec<Vec<&'static str>> {
        vec![vec!["dog", "cat"], vec!["dog"], vec!["bird"]]
    }

    #[test]
    fn idf_values() {
        let m = fit_tfidf(&corpus()).unwrap();
        assert_eq!(m.n_docs(), 3);
        assert_eq!(m.df(), &[2, 1, 1]);
        assert_eq!(m.idf()[m.column("dog").unwrap()], 0.0);
        assert!((m.idf()[m.column("bird").unwrap()] - 0.405465108108164).abs() < 1e-12);
        let all = fit_tfidf(&[vec!["x"], vec!["x"], vec!["x"]]).unwrap();
        assert!((all.idf()[0] - (-0.2876820724517809)).abs() < 1e-12);
    }

    #[test]
    fn transform_values() {
        let m = fit_tfidf(&corpus()).unwrap();
        let v = m.transform(&["bird", "bird"]);
        assert_eq!(v.nnz(), 1);
        assert!((v.get(m.column("bird").unwrap()) - 0.810930216216329).abs() < 1e-12);
        assert!(m.transform(&["dog"]).is_empty());
        assert!(m.transform(&["unseenword"]).is_empty());
        assert!(m.transform(&Vec::<&str>::new()).is_empty());
    }

    #[test]
    fn degenerate_corpora_rejected() {
        assert!(fit_tfidf(&Vec::<Vec<&str>>::new()).is_err());
        assert!(fit_tfidf(&[Vec::<&str>::new(), vec![]]).is_err());
    }

    #[test]
    fn batch_encoding() {
        let vocab = Vocabulary::build(&[vec!["a", "b"]]);
        let batch = encode_batch(&[vec!["a"], vec!["b", "a"]], &vocab, 3);
        assert_eq!(batch.len(), 2);
        assert_eq!(batch[1].indices(), &[3, 2, 0]);
        let empty = encode_batch(&[Vec::<&str>::new(), vec![]], &vocab, 2);
        assert!(empty.iter().all(|s| s.indices() == [0, 0]));
    }

    #[test]
    fn sparse_vector_invariants() {
        let v = SparseVector::new(vec![(3, 1.0), (1, 0.0), (0, -2.0)]).unwrap();
        assert_eq!(v.pairs(), &[(0, -2.0), (3, 1.0)]);
        assert!(SparseVector::new(vec![(1, 1.0), (1, 2.0)]).is_err());
    }
}
