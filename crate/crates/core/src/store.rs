//! The on-disk store: one directory with versioned sections (records,
//! das, labels, model, authors, citations, table).
//!
//! Line-delimited sections start with a header line carrying the section
//! name and format version, followed by one JSON value per line. Writes
//! go to a temporary file that replaces the section whole, so a section
//! is never partially rewritten. One writer at a time is enforced with
//! an advisory lock file; readers are unrestricted.

use crate::classify::{LabeledExample, TrainedModel};
use crate::das::DasStatement;
use crate::graph::{AuthorProfile, CitationIndex};
use crate::ingest::ArticleRecord;
use crate::table::RegressionRow;
use crate::{Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct Store {
    root: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
struct SectionHeader {
    section: String,
    format_version: u32,
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    format_version: u32,
}

/// Advisory writer lock; the lock file is removed on drop.
pub struct WriterLock {
    path: PathBuf,
}

impl Drop for WriterLock {
    fn drop(&mut self) {
        let _ = std::fs::remove_file(&self.path);
    }
}

impl Store {
    pub fn open(root: impl Into<PathBuf>) -> Store {
        Store { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Create the store directory and its meta file if missing; verify
    /// the format version if present.
    pub fn create(root: impl Into<PathBuf>) -> Result<Store> {
        let store = Store::open(root);
        std::fs::create_dir_all(&store.root)
            .map_err(|e| Error::io(store.root.display().to_string(), e))?;
        let meta_path = store.root.join("meta.json");
        if meta_path.exists() {
            store.check_meta()?;
        } else {
            let meta = Meta { format_version: FORMAT_VERSION };
            let body = serde_json::to_string(&meta).expect("meta serializes");
            std::fs::write(&meta_path, body)
                .map_err(|e| Error::io(meta_path.display().to_string(), e))?;
        }
        Ok(store)
    }

    pub fn exists(&self) -> bool {
        self.root.join("meta.json").exists()
    }

    fn check_meta(&self) -> Result<()> {
        let meta_path = self.root.join("meta.json");
        let body = std::fs::read_to_string(&meta_path)
            .map_err(|e| Error::io(meta_path.display().to_string(), e))?;
        let meta: Meta = serde_json::from_str(&body)
            .map_err(|e| Error::Store(format!("bad meta.json: {e}")))?;
        if meta.format_version != FORMAT_VERSION {
            return Err(Error::Store(format!(
                "store format version {} is not supported (expected {FORMAT_VERSION})",
                meta.format_version
            )));
        }
        Ok(())
    }

    pub fn lock_writer(&self) -> Result<WriterLock> {
        let path = self.root.join(".lock");
        match std::fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(WriterLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::Store(
                format!("store is locked by another writer ({})", path.display()),
            )),
            Err(e) => Err(Error::io(path.display().to_string(), e)),
        }
    }

    pub fn section_path(&self, section: &str) -> PathBuf {
        match section {
            "model" => self.root.join("model.bin"),
            "labels" => self.root.join("labels.csv"),
            other => self.root.join(format!("{other}.jsonl")),
        }
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.section_path(section).exists()
    }

    fn write_jsonl<T: Serialize>(&self, section: &str, items: &[T]) -> Result<()> {
        let path = self.section_path(section);
        let tmp = path.with_extension("jsonl.tmp");
        let display = tmp.display().to_string();
        {
            let file =
                std::fs::File::create(&tmp).map_err(|e| Error::io(display.clone(), e))?;
            let mut w = BufWriter::new(file);
            let header = SectionHeader {
                section: section.to_string(),
                format_version: FORMAT_VERSION,
            };
            serde_json::to_writer(&mut w, &header)
                .map_err(|e| Error::Store(e.to_string()))?;
            w.write_all(b"\n").map_err(|e| Error::io(display.clone(), e))?;
            for item in items {
                serde_json::to_writer(&mut w, item).map_err(|e| Error::Store(e.to_string()))?;
                w.write_all(b"\n").map_err(|e| Error::io(display.clone(), e))?;
            }
            w.flush().map_err(|e| Error::io(display.clone(), e))?;
        }
        std::fs::rename(&tmp, &path).map_err(|e| Error::io(display, e))?;
        Ok(())
    }

    fn read_jsonl<T: DeserializeOwned>(&self, section: &str) -> Result<Vec<T>> {
        let path = self.section_path(section);
        let display = path.display().to_string();
        if !path.exists() {
            return Err(Error::Store(format!("section {section:?} not built ({display})")));
        }
        let file = std::fs::File::open(&path).map_err(|e| Error::io(display.clone(), e))?;
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::Store(format!("{display}: empty section file")))?
            .map_err(|e| Error::io(display.clone(), e))?;
        let header: SectionHeader = serde_json::from_str(&header_line)
            .map_err(|e| Error::Store(format!("{display}: bad header: {e}")))?;
        if header.section != section || header.format_version != FORMAT_VERSION {
            return Err(Error::Store(format!(
                "{display}: unexpected header {header:?}"
            )));
        }
        let mut out = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::io(display.clone(), e))?;
            if line.trim().is_empty() {
                continue;
            }
            out.push(
                serde_json::from_str(&line)
                    .map_err(|e| Error::Store(format!("{display}: bad line: {e}")))?,
            );
        }
        Ok(out)
    }

    pub fn write_records(&self, records: &[ArticleRecord]) -> Result<()> {
        self.write_jsonl("records", records)
    }

    pub fn read_records(&self) -> Result<Vec<ArticleRecord>> {
        self.read_jsonl("records")
    }

    pub fn write_das(&self, statements: &[DasStatement]) -> Result<()> {
        self.write_jsonl("das", statements)
    }

    pub fn read_das(&self) -> Result<Vec<DasStatement>> {
        self.read_jsonl("das")
    }

    pub fn write_labels(&self, labels: &[LabeledExample]) -> Result<()> {
        crate::classify::write_labels(&self.section_path("labels"), labels)
    }

    pub fn read_labels(&self) -> Result<Vec<LabeledExample>> {
        let path = self.section_path("labels");
        if !path.exists() {
            return Err(Error::Store("section \"labels\" not built".to_string()));
        }
        crate::classify::load_labels(&path)
    }

    pub fn write_model(&self, model: &TrainedModel) -> Result<()> {
        crate::classify::write_model(&self.section_path("model"), model)
    }

    pub fn read_model(&self) -> Result<TrainedModel> {
        let path = self.section_path("model");
        if !path.exists() {
            return Err(Error::Store("section \"model\" not built".to_string()));
        }
        crate::classify::read_model(&path)
    }

    pub fn write_authors(&self, profiles: &[AuthorProfile]) -> Result<()> {
        self.write_jsonl("authors", profiles)
    }

    pub fn read_authors(&self) -> Result<Vec<AuthorProfile>> {
        self.read_jsonl("authors")
    }

    pub fn write_citations(&self, index: &CitationIndex) -> Result<()> {
        let entries: Vec<CitationEntry> = index
            .iter()
            .map(|(cited, citing)| CitationEntry { cited: cited.clone(), citing: citing.clone() })
            .collect();
        self.write_jsonl("citations", &entries)
    }

    pub fn read_citations(&self) -> Result<CitationIndex> {
        let entries: Vec<CitationEntry> = self.read_jsonl("citations")?;
        let edges = entries.into_iter().map(|e| (e.cited, e.citing)).collect();
        Ok(CitationIndex::from_edges(edges))
    }

    pub fn write_table(&self, rows: &[RegressionRow]) -> Result<()> {
        self.write_jsonl("table", rows)
    }

    pub fn read_table(&self) -> Result<Vec<RegressionRow>> {
        self.read_jsonl("table")
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CitationEntry {
    cited: String,
    citing: Vec<(String, crate::dates::YearMonth)>,
}

/// Training provenance, written next to the model so later commands
/// (evaluation in particular) reproduce the same split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub format_version: u32,
    pub split_seed: u64,
    pub svm_seed: u64,
    pub lambda: f64,
    pub epochs: usize,
    pub classifier: String,
    pub stemming: bool,
    pub stopword_filter: bool,
    pub held_out_accuracy: f64,
}

impl Store {
    pub fn write_train_meta(&self, meta: &TrainMeta) -> Result<()> {
        let path = self.root.join("train_meta.json");
        let body = serde_json::to_string_pretty(meta).map_err(|e| Error::Store(e.to_string()))?;
        std::fs::write(&path, body).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn read_train_meta(&self) -> Result<TrainMeta> {
        let path = self.root.join("train_meta.json");
        if !path.exists() {
            return Err(Error::Store("train metadata not present (run train first)".into()));
        }
        let body = std::fs::read_to_string(&path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&body).map_err(|e| Error::Store(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ArticleId, ArticleType, IdKind, Publisher};

    fn record(doi: &str) -> ArticleRecord {
        let mut id = ArticleId::default();
        id.set(IdKind::Doi, doi);
        ArticleRecord {
            id,
            journal_title: "PLOS ONE".into(),
            publisher: Publisher::Plos,
            pub_year: 2014,
            pub_month: Some(5),
            authors: vec![],
            references: vec![],
            n_references_total: 2,
            article_type: ArticleType::Research,
            das_candidates: vec![],
        }
    }

    #[test]
    fn records_roundtrip_and_are_byte_stable() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::create(dir.path().join("store")).unwrap();
        let records = vec![record("10.1/a"), record("10.1/b")];
        store.write_records(&records).unwrap();
        let first = std::fs::read(store.section_path("records")).unwrap();
        let loaded = store.read_records().unwrap();
        assert_eq!(loaded.len(), 2);
        store.write_records(&loaded).unwrap();
        let second = std::fs::read(store.section_path("records")).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn missing_section_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::create(dir.path().join("store")).unwrap();
        match store.read_table() {
            Err(Error::Store(msg)) => assert!(msg.contains("not built"), "{msg}"),
            other => panic!("expected store error, got {other:?}"),
        }
    }

    #[test]
    fn writer_lock_is_exclusive() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::create(dir.path().join("store")).unwrap();
        let lock = store.lock_writer().unwrap();
        assert!(store.lock_writer().is_err());
        drop(lock);
        assert!(store.lock_writer().is_ok());
    }

    #[test]
    fn foreign_meta_version_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("store");
        std::fs::create_dir_all(&root).unwrap();
        std::fs::write(root.join("meta.json"), r#"{"format_version":99}"#).unwrap();
        assert!(Store::create(&root).is_err());
    }
}
