//! Vocabulary construction and bag-of-words / TF-IDF vectorization.
//!
//! The TF-IDF weight of term `t` in document `d` is the term frequency
//! (count of `t` in `d` divided by the total token count of `d`) times
//! the inverse document frequency `ln(N / df(t))`. The natural logarithm
//! is used throughout so results are reproducible; terms appearing in
//! every document get weight zero and are dropped from storage.

use crate::text::TokenSequence;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Term-to-index map with per-term document frequencies.
///
/// Indices are contiguous from zero and assigned in lexicographic term
/// order, which makes vocabulary construction deterministic across runs
/// and thread counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyData", into = "VocabularyData")]
pub struct Vocabulary {
    terms: Vec<TermEntry>,
    index: BTreeMap<String, usize>,
    n_documents: usize,
}

/// Serialized form; the lookup index is rebuilt on load.
#[derive(Serialize, Deserialize)]
struct VocabularyData {
    terms: Vec<TermEntry>,
    n_documents: usize,
}

impl From<VocabularyData> for Vocabulary {
    fn from(data: VocabularyData) -> Self {
        let mut v =
            Vocabulary { terms: data.terms, index: BTreeMap::new(), n_documents: data.n_documents };
        v.rebuild_index();
        v
    }
}

impl From<Vocabulary> for VocabularyData {
    fn from(v: Vocabulary) -> Self {
        VocabularyData { terms: v.terms, n_documents: v.n_documents }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEntry {
    pub term: String,
    pub df: usize,
}

impl Vocabulary {
    /// Build from a prepared corpus. `df` counts documents containing the
    /// term, not occurrences.
    pub fn build<'a, I>(corpus: I) -> Result<Vocabulary>
    where
        I: IntoIterator<Item = &'a TokenSequence>,
    {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        let mut n_documents = 0;
        for doc in corpus {
            n_documents += 1;
            let mut seen: Vec<&str> = doc.tokens.iter().map(String::as_str).collect();
            seen.sort_unstable();
            seen.dedup();
            for term in seen {
                *df.entry(term).or_insert(0) += 1;
            }
        }
        if n_documents == 0 {
            return Err(Error::EmptyCorpus);
        }
        let terms: Vec<TermEntry> = df
            .into_iter()
            .map(|(term, df)| TermEntry { term: term.to_string(), df })
            .collect();
        let mut vocab = Vocabulary { terms, index: BTreeMap::new(), n_documents };
        vocab.rebuild_index();
        Ok(vocab)
    }

    fn rebuild_index(&mut self) {
        self.index =
            self.terms.iter().enumerate().map(|(i, e)| (e.term.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n_documents(&self) -> usize {
        self.n_documents
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn df(&self, index: usize) -> usize {
        self.terms[index].df
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index].term
    }

    pub fn entries(&self) -> &[TermEntry] {
        &self.terms
    }

    /// Write the vocabulary to a versioned JSON file: format version,
    /// document count, and the (term, df) entries in index order.
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let file = VocabularyFile {
            format_version: VOCABULARY_FORMAT_VERSION,
            n_documents: self.n_documents,
            terms: self.terms.clone(),
        };
        let body = serde_json::to_string(&file)
            .map_err(|e| Error::bad_input(path.display().to_string(), e.to_string()))?;
        std::fs::write(path, body).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &std::path::Path) -> Result<Vocabulary> {
        let display = path.display().to_string();
        let body = std::fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
        let file: VocabularyFile = serde_json::from_str(&body)
            .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
        if file.format_version != VOCABULARY_FORMAT_VERSION {
            return Err(Error::bad_input(
                display,
                format!("unsupported vocabulary format version {}", file.format_version),
            ));
        }
        let mut vocab = Vocabulary {
            terms: file.terms,
            index: BTreeMap::new(),
            n_documents: file.n_documents,
        };
        vocab.rebuild_index();
        Ok(vocab)
    }
}

pub const VOCABULARY_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct VocabularyFile {
    format_version: u32,
    n_documents: usize,
    terms: Vec<TermEntry>,
}

/// Sparse vector of (index, weight) pairs with strictly increasing
/// indices and no stored zeros.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    pub entries: Vec<(usize, f64)>,
}

impl SparseVector {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w * w).sum::<f64>().sqrt()
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.entries.iter().map(|(i, w)| w * dense[*i]).sum()
    }

    pub fn scale(&self, factor: f64) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|&(i, w)| (i, w * factor)).collect(),
        }
    }
}

/// Raw occurrence counts over the vocabulary. Out-of-vocabulary tokens
/// are dropped.
pub fn vectorize_bow(doc: &TokenSequence, vocab: &Vocabulary) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for token in &doc.tokens {
        if let Some(idx) = vocab.index_of(token) {
            *counts.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    SparseVector { entries: counts.into_iter().collect() }
}

/// TF-IDF weights from a bag-of-words vector.
///
/// `doc_length` is the total token count of the document before any
/// out-of-vocabulary drop, so term frequencies reflect the document as
/// written.
pub fn tfidf_weight(
    bow: &SparseVector,
    doc_length: usize,
    vocab: &Vocabulary,
) -> Result<SparseVector> {
    if doc_length == 0 {
        return Err(Error::ZeroLengthDocument);
    }
    let n = vocab.n_documents() as f64;
    let entries = bow
        .iter()
        .filter_map(|(idx, count)| {
            let df = vocab.df(idx);
            if df == vocab.n_documents() {
                // idf = ln(N/N) = 0
                return None;
            }
            let tf = count / doc_length as f64;
            let idf = (n / df as f64).ln();
            Some((idx, tf * idf))
        })
        .collect();
    Ok(SparseVector { entries })
}

/// Tokenized document vectorized straight to TF-IDF.
pub fn vectorize_tfidf(doc: &TokenSequence, vocab: &Vocabulary) -> Result<SparseVector> {
    if doc.is_empty() {
        return Ok(SparseVector::default());
    }
    let bow = vectorize_bow(doc, vocab);
    tfidf_weight(&bow, doc.len(), vocab)
}
