//! Deterministic text normalization: tokenization, stop-word removal and
//! stemming.
//!
//! Tokens are lowercased and split on any character that is not a letter
//! or a digit. Digit runs are kept as tokens: repository accessions and
//! DOI fragments carry signal for the "data in a repository" category.

mod porter;

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

pub use porter::stem;

/// The shipped English stop-word list (127 entries, one per line).
pub const DEFAULT_STOPWORDS: &str = include_str!("stopwords.txt");

/// Preprocessing switches. Both are independently toggleable, giving the
/// 2x2 grid explored during model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PrepConfig {
    pub stopword_filter: bool,
    pub stemming: bool,
}

impl PrepConfig {
    pub fn new(stopword_filter: bool, stemming: bool) -> Self {
        PrepConfig { stopword_filter, stemming }
    }

    /// All four cells of the stop-word x stemming grid.
    pub fn grid() -> [PrepConfig; 4] {
        [
            PrepConfig::new(false, false),
            PrepConfig::new(false, true),
            PrepConfig::new(true, false),
            PrepConfig::new(true, true),
        ]
    }
}

/// An ordered sequence of lowercase tokens. No token is empty or contains
/// whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSequence {
    pub tokens: Vec<String>,
}

impl TokenSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A loaded stop-word list.
#[derive(Debug, Clone)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    /// Parse a list from its file format: one token per line, UTF-8.
    /// Blank lines are ignored.
    pub fn parse(contents: &str) -> Self {
        let words = contents
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(|w| w.to_lowercase())
            .collect();
        StopwordList { words }
    }

    pub fn load(path: &std::path::Path) -> crate::Result<Self> {
        let contents = std::fs::read_to_string(path)
            .map_err(|e| crate::Error::io(path.display().to_string(), e))?;
        Ok(Self::parse(&contents))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.words.contains(token)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Sorted copy of the list, for embedding into model files.
    pub fn to_sorted_vec(&self) -> Vec<String> {
        let mut v: Vec<String> = self.words.iter().cloned().collect();
        v.sort();
        v
    }

    pub fn from_words(words: impl IntoIterator<Item = String>) -> Self {
        StopwordList { words: words.into_iter().collect() }
    }
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }
}

/// Lowercase and split on non-alphanumeric characters.
pub fn tokenize(text: &str) -> TokenSequence {
    let lower = text.to_lowercase();
    let tokens = lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect();
    TokenSequence { tokens }
}

/// Drop tokens present in the stop-word list, preserving order.
pub fn remove_stopwords(tokens: TokenSequence, stopwords: &StopwordList) -> TokenSequence {
    TokenSequence {
        tokens: tokens.tokens.into_iter().filter(|t| !stopwords.contains(t)).collect(),
    }
}

/// Full preprocessing pipeline: tokenize, then apply the configured
/// stop-word filter and stemmer.
pub fn prepare(text: &str, config: PrepConfig, stopwords: &StopwordList) -> TokenSequence {
    let mut seq = tokenize(text);
    if config.stopword_filter {
        seq = remove_stopwords(seq, stopwords);
    }
    if config.stemming {
        seq.tokens = seq.tokens.iter().map(|t| stem(t)).collect();
    }
    seq
}
