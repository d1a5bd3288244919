//! Verb lemmatization by ordered suffix rules plus an irregular-verb table.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::porter::{ends_cvc, has_vowel, measure};
use crate::{Error, Result};

const DEFAULT_EXCEPTIONS: &str = include_str!("../../data/verb_exceptions.tsv");

/// Reduce a lowercase token to a verb lemma.
///
/// Exceptions win outright. Otherwise the first matching rule applies:
/// `-ies -> -y`, `-es` (dropped after s/x/z/ch/sh, else only the `s`),
/// `-s`, `-ing`, `-eed -> -ee`, `-ed`. After `-ing`/`-ed` a doubled final
/// consonant is undone (except l, s, z) and a short consonant-vowel-consonant
/// stem gets its `e` back. Results shorter than two letters, or stems
/// without a vowel, leave the word unchanged.
pub fn lemmatize_verb(word: &str, exceptions: &HashMap<String, String>) -> String {
    if let Some(lemma) = exceptions.get(word) {
        return lemma.clone();
    }
    match apply_rules(word) {
        Some(lemma) if lemma.len() >= 2 => lemma,
        _ => word.to_string(),
    }
}

fn apply_rules(word: &str) -> Option<String> {
    if !word.bytes().all(|b| b.is_ascii_lowercase()) {
        return None;
    }
    if let Some(stem) = word.strip_suffix("ies") {
        return Some(format!("{stem}y"));
    }
    if let Some(stem) = word.strip_suffix("es") {
        let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s));
        return Some(if sibilant { stem.to_string() } else { format!("{stem}e") });
    }
    if let Some(stem) = word.strip_suffix('s') {
        if ["ss", "us", "is"].iter().any(|s| word.ends_with(s)) {
            return None;
        }
        return Some(stem.to_string());
    }
    if let Some(stem) = word.strip_suffix("ing") {
        return restore(stem);
    }
    if let Some(stem) = word.strip_suffix("eed") {
        return (measure(stem.as_bytes()) > 0).then(|| format!("{stem}ee"));
    }
    if let Some(stem) = word.strip_suffix("ed") {
        return restore(stem);
    }
    None
}

fn restore(stem: &str) -> Option<String> {
    let b = stem.as_bytes();
    if !has_vowel(b) {
        return None;
    }
    let n = b.len();
    if n >= 2 && b[n - 1] == b[n - 2] && !matches!(b[n - 1], b'a' | b'e' | b'i' | b'o' | b'u' | b'l' | b's' | b'z') {
        return Some(stem[..n - 1].to_string());
    }
    if measure(b) == 1 && ends_cvc(b) {
        return Some(format!("{stem}e"));
    }
    Some(stem.to_string())
}

/// A verb lemmatizer carrying its exception table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbLemmatizer {
    exceptions: HashMap<String, String>,
}

impl Default for VerbLemmatizer {
    /// The bundled table of irregular verb forms.
    fn default() -> Self {
        Self::parse(DEFAULT_EXCEPTIONS).expect("bundled exception table is well-formed")
    }
}

impl VerbLemmatizer {
    pub fn new(exceptions: HashMap<String, String>) -> Self {
        VerbLemmatizer { exceptions }
    }

    /// Parse `inflected<TAB>lemma` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut exceptions = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut parts = content.split('\t').map(str::trim).filter(|s| !s.is_empty());
            match (parts.next(), parts.next(), parts.next()) {
                (Some(inflected), Some(lemma), None) => {
                    exceptions.insert(inflected.to_string(), lemma.to_string());
                }
                _ => return Err(Error::Parse { line: i + 1, message: "expected `inflected<TAB>lemma`".into() }),
            }
        }
        Ok(VerbLemmatizer { exceptions })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    pub fn exceptions(&self) -> &HashMap<String, String> {
        &self.exceptions
    }

    pub fn lemmatize(&self, word: &str) -> String {
        lemmatize_verb(word, &self.exceptions)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plain(w: &str) -> String {
        lemmatize_verb(w, &HashMap::new())
    }

    #[test]
    fn exception_lookup() {
        let table = HashMap::from([("went".to_string(), "go".to_string())]);
        assert_eq!(lemmatize_verb("went", &table), "go");
    }

    #[test]
    fn rule_traces() {
        for (w, l) in [
            ("running", "run"),
            ("making", "make"),
            ("hoping", "hope"),
            ("hopping", "hop"),
            ("falling", "fall"),
            ("fixed", "fix"),
            ("played", "play"),
            ("visited", "visit"),
            ("agreed", "agree"),
            ("need", "need"),
            ("cries", "cry"),
            ("pushes", "push"),
            ("makes", "make"),
            ("hates", "hate"),
            ("kills", "kill"),
            ("passes", "pass"),
            ("thing", "thing"),
            ("fool", "fool"),
        ] {
            assert_eq!(plain(w), l, "{w}");
        }
    }

    #[test]
    fn short_words_survive() {
        assert_eq!(plain("is"), "is");
        assert_eq!(plain("as"), "as");
        assert_eq!(plain("ed"), "ed");
        assert_eq!(VerbLemmatizer::default().lemmatize("is"), "be");
    }

    #[test]
    fn bundled_table_is_substantial() {
        let lem = VerbLemmatizer::default();
        assert!(lem.exceptions().len() >= 200);
        assert_eq!(lem.lemmatize("went"), "go");
        assert_eq!(lem.lemmatize("thought"), "think");
    }

    #[test]
    fn malformed_table_line() {
        assert!(matches!(VerbLemmatizer::parse("went\n"), Err(Error::Parse { line: 1, .. })));
        assert!(VerbLemmatizer::parse("# c\n\nwent\tgo # trailing\n").is_ok());
    }
}
