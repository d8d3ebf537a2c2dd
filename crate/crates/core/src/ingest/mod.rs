//! JATS corpus ingestion: parse articles, normalize identifiers, merge
//! duplicates and apply the corpus filters.
//!
//! Retained records always carry at least one identifier, a publication
//! year and at least one reference; anything else is reported as a
//! [`ParseRejection`], which is a filter outcome rather than an error.

mod jats;
pub mod journals;

use crate::das::{DasCandidate, ExtractionRules};
use crate::dates::YearMonth;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::{Path, PathBuf};

pub use journals::{JournalPolicy, JournalPolicyTable};

/// Identifier kinds in resolution priority order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IdKind {
    Doi,
    Pmid,
    Pmcid,
    PublisherId,
}

pub const ID_PRIORITY: [IdKind; 4] = [IdKind::Doi, IdKind::Pmid, IdKind::Pmcid, IdKind::PublisherId];

/// Article identifiers, normalized at construction time: DOIs lowercased
/// and stripped of resolver prefixes, PMIDs/PMCIDs stripped of "PMC" and
/// whitespace variants.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArticleId {
    pub doi: Option<String>,
    pub pmid: Option<String>,
    pub pmcid: Option<String>,
    pub publisher_id: Option<String>,
}

impl ArticleId {
    pub fn is_empty(&self) -> bool {
        self.doi.is_none()
            && self.pmid.is_none()
            && self.pmcid.is_none()
            && self.publisher_id.is_none()
    }

    pub fn set(&mut self, kind: IdKind, raw: &str) {
        let value = match kind {
            IdKind::Doi => normalize_doi(raw),
            IdKind::Pmid => normalize_numeric_id(raw, &["pmid", ":"]),
            IdKind::Pmcid => normalize_numeric_id(raw, &["pmcid", "pmc", ":"]),
            IdKind::PublisherId => {
                let v = raw.trim();
                if v.is_empty() { None } else { Some(v.to_string()) }
            }
        };
        if value.is_none() {
            return;
        }
        match kind {
            IdKind::Doi => self.doi = value,
            IdKind::Pmid => self.pmid = value,
            IdKind::Pmcid => self.pmcid = value,
            IdKind::PublisherId => self.publisher_id = value,
        }
    }

    pub fn get(&self, kind: IdKind) -> Option<&str> {
        match kind {
            IdKind::Doi => self.doi.as_deref(),
            IdKind::Pmid => self.pmid.as_deref(),
            IdKind::Pmcid => self.pmcid.as_deref(),
            IdKind::PublisherId => self.publisher_id.as_deref(),
        }
    }

    /// Two ids refer to the same article when any field present on both
    /// sides is equal.
    pub fn matches(&self, other: &ArticleId) -> bool {
        ID_PRIORITY.iter().any(|&kind| match (self.get(kind), other.get(kind)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        })
    }

    /// Stable key for dedup and store ordering: the highest-priority
    /// field present.
    pub fn canonical_key(&self) -> String {
        for kind in ID_PRIORITY {
            if let Some(v) = self.get(kind) {
                let tag = match kind {
                    IdKind::Doi => "doi",
                    IdKind::Pmid => "pmid",
                    IdKind::Pmcid => "pmcid",
                    IdKind::PublisherId => "pub",
                };
                return format!("{tag}:{v}");
            }
        }
        String::new()
    }

    /// Copy fields absent on `self` from `other`.
    fn absorb(&mut self, other: &ArticleId) -> bool {
        let mut changed = false;
        for kind in ID_PRIORITY {
            if self.get(kind).is_none() {
                if let Some(v) = other.get(kind) {
                    self.set_raw(kind, v.to_string());
                    changed = true;
                }
            }
        }
        changed
    }

    fn set_raw(&mut self, kind: IdKind, value: String) {
        match kind {
            IdKind::Doi => self.doi = Some(value),
            IdKind::Pmid => self.pmid = Some(value),
            IdKind::Pmcid => self.pmcid = Some(value),
            IdKind::PublisherId => self.publisher_id = Some(value),
        }
    }
}

fn normalize_doi(raw: &str) -> Option<String> {
    let mut v = raw.trim().to_lowercase();
    for prefix in ["https://doi.org/", "http://doi.org/", "https://dx.doi.org/", "http://dx.doi.org/", "doi.org/", "doi:"] {
        if let Some(rest) = v.strip_prefix(prefix) {
            v = rest.trim().to_string();
            break;
        }
    }
    if v.is_empty() { None } else { Some(v) }
}

fn normalize_numeric_id(raw: &str, strip: &[&str]) -> Option<String> {
    let mut v: String = raw.split_whitespace().collect::<String>().to_lowercase();
    for prefix in strip {
        if let Some(rest) = v.strip_prefix(prefix) {
            v = rest.to_string();
        }
    }
    let v = v.trim_start_matches(':').to_string();
    if v.is_empty() { None } else { Some(v) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Publisher {
    Plos,
    Bmc,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArticleType {
    Research,
    Review,
    Editorial,
    Other,
}

impl ArticleType {
    pub fn from_jats(attr: &str) -> Self {
        match attr.trim().to_lowercase().as_str() {
            "research-article" => ArticleType::Research,
            "review-article" | "review" => ArticleType::Review,
            "editorial" => ArticleType::Editorial,
            _ => ArticleType::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub given_name: String,
    pub surname: String,
}

/// One parsed publication.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArticleRecord {
    pub id: ArticleId,
    pub journal_title: String,
    pub publisher: Publisher,
    pub pub_year: i32,
    pub pub_month: Option<u32>,
    pub authors: Vec<AuthorName>,
    /// References that carried at least one identifier.
    pub references: Vec<ArticleId>,
    /// All references, identifier-less ones included.
    pub n_references_total: usize,
    pub article_type: ArticleType,
    /// Sections / metadata elements matching an extraction rule pattern,
    /// kept so DAS extraction can run without the source XML.
    pub das_candidates: Vec<DasCandidate>,
}

impl ArticleRecord {
    pub fn key(&self) -> String {
        self.id.canonical_key()
    }

    pub fn pub_date(&self) -> YearMonth {
        YearMonth::effective(self.pub_year, self.pub_month)
    }
}

/// Why a parsed document was not retained. These are corpus filter
/// outcomes, not failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectionReason {
    MissingId,
    MissingDate,
    NoReferences,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRejection {
    pub reason: RejectionReason,
}

#[derive(Debug)]
pub enum ParseOutcome {
    Retained(Box<ArticleRecord>),
    Rejected(ParseRejection),
}

/// Parse one JATS document. `rules` determines which sections and
/// metadata elements are kept as DAS candidates.
pub fn parse_article(xml_document: &[u8], rules: &ExtractionRules) -> Result<ParseOutcome> {
    jats::parse(xml_document, rules)
}

/// Journal-name rule plus curated-list lookup.
pub fn assign_publisher(journal_title: &str, table: &JournalPolicyTable) -> Publisher {
    if journal_title.trim().to_lowercase().starts_with("plos") {
        return Publisher::Plos;
    }
    table.publisher_of(journal_title).unwrap_or(Publisher::Other)
}

/// Restrict to PLOS/BMC journal articles: review articles and editorials
/// are dropped, unknown journals are assigned [`Publisher::Other`] and
/// excluded.
pub fn filter_analysis_set(
    records: &[ArticleRecord],
    table: &JournalPolicyTable,
) -> Vec<ArticleRecord> {
    records
        .iter()
        .filter_map(|r| {
            let publisher = assign_publisher(&r.journal_title, table);
            if publisher == Publisher::Other {
                return None;
            }
            if matches!(r.article_type, ArticleType::Review | ArticleType::Editorial) {
                return None;
            }
            let mut out = r.clone();
            out.publisher = publisher;
            Some(out)
        })
        .collect()
}

/// Merge duplicate records appearing under multiple identifiers.
///
/// The first-seen record wins on conflicting metadata (logged);
/// complementary identifier fields are absorbed so later references can
/// resolve through any of them.
pub fn merge_records(records: Vec<ArticleRecord>) -> Vec<ArticleRecord> {
    let mut merged: Vec<ArticleRecord> = Vec::with_capacity(records.len());
    let mut by_id: HashMap<(IdKind, String), usize> = HashMap::new();
    for record in records {
        let hit = ID_PRIORITY.iter().find_map(|&kind| {
            record.id.get(kind).and_then(|v| by_id.get(&(kind, v.to_string())).copied())
        });
        match hit {
            Some(idx) => {
                let existing = &mut merged[idx];
                if existing.journal_title != record.journal_title
                    || existing.pub_year != record.pub_year
                {
                    log::warn!(
                        "duplicate record {} has conflicting metadata; keeping first-seen",
                        record.key()
                    );
                }
                if existing.id.absorb(&record.id) {
                    for kind in ID_PRIORITY {
                        if let Some(v) = existing.id.get(kind) {
                            by_id.entry((kind, v.to_string())).or_insert(idx);
                        }
                    }
                }
            }
            None => {
                let idx = merged.len();
                for kind in ID_PRIORITY {
                    if let Some(v) = record.id.get(kind) {
                        by_id.insert((kind, v.to_string()), idx);
                    }
                }
                merged.push(record);
            }
        }
    }
    merged
}

#[derive(Debug, Default)]
pub struct IngestSummary {
    pub records: Vec<ArticleRecord>,
    pub files_read: usize,
    pub rejections: Vec<(PathBuf, RejectionReason)>,
}

/// Recursively collect `.xml` / `.xml.gz` files under `root`, sorted by
/// path so ingestion order is stable.
pub fn collect_input_files(root: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        let entries =
            std::fs::read_dir(&dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir.display().to_string(), e))?;
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
                if name.ends_with(".xml") || name.ends_with(".xml.gz") {
                    files.push(path);
                }
            }
        }
    }
    files.sort();
    Ok(files)
}

fn read_input_file(path: &Path) -> Result<Vec<u8>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    if path.extension().and_then(|e| e.to_str()) == Some("gz") {
        use std::io::Read;
        let mut decoder = flate2::read::GzDecoder::new(raw.as_slice());
        let mut out = Vec::new();
        decoder
            .read_to_end(&mut out)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

/// Ingest a directory tree of JATS files. Parsing is parallel per file;
/// results are folded in sorted path order, so the record set is
/// independent of thread count.
pub fn ingest_dir(
    root: &Path,
    rules: &ExtractionRules,
    table: &JournalPolicyTable,
) -> Result<IngestSummary> {
    let files = collect_input_files(root)?;
    let parsed: Vec<(PathBuf, Result<ParseOutcome>)> = files
        .par_iter()
        .map(|path| {
            let outcome = read_input_file(path).and_then(|bytes| parse_article(&bytes, rules));
            (path.clone(), outcome)
        })
        .collect();

    let mut summary = IngestSummary { files_read: parsed.len(), ..Default::default() };
    let mut records = Vec::new();
    for (path, outcome) in parsed {
        match outcome? {
            ParseOutcome::Retained(mut record) => {
                record.publisher = assign_publisher(&record.journal_title, table);
                records.push(*record);
            }
            ParseOutcome::Rejected(r) => summary.rejections.push((path, r.reason)),
        }
    }
    summary.records = merge_records(records);
    summary.records.sort_by_key(|r| r.key());
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id_with(kind: IdKind, v: &str) -> ArticleId {
        let mut id = ArticleId::default();
        id.set(kind, v);
        id
    }

    #[test]
    fn doi_normalization() {
        let id = id_with(IdKind::Doi, "https://doi.org/10.1371/JOURNAL.PONE.0098191");
        assert_eq!(id.doi.as_deref(), Some("10.1371/journal.pone.0098191"));
        let id = id_with(IdKind::Doi, "doi:10.1186/1471-2164-14-876");
        assert_eq!(id.doi.as_deref(), Some("10.1186/1471-2164-14-876"));
    }

    #[test]
    fn pmcid_normalization() {
        let id = id_with(IdKind::Pmcid, "PMC 4012345");
        assert_eq!(id.pmcid.as_deref(), Some("4012345"));
        let id = id_with(IdKind::Pmcid, "pmc4012345");
        assert_eq!(id.pmcid.as_deref(), Some("4012345"));
    }

    #[test]
    fn id_matching_on_any_shared_field() {
        let mut a = id_with(IdKind::Doi, "10.1/x");
        a.set(IdKind::Pmid, "123");
        let b = id_with(IdKind::Pmid, "123");
        assert!(a.matches(&b));
        let c = id_with(IdKind::Doi, "10.1/y");
        assert!(!a.matches(&c));
    }

    #[test]
    fn canonical_key_uses_priority_chain() {
        let mut id = id_with(IdKind::Pmid, "123");
        assert_eq!(id.canonical_key(), "pmid:123");
        id.set(IdKind::Doi, "10.1/x");
        assert_eq!(id.canonical_key(), "doi:10.1/x");
    }

    fn record(doi: &str, journal: &str, year: i32) -> ArticleRecord {
        ArticleRecord {
            id: id_with(IdKind::Doi, doi),
            journal_title: journal.to_string(),
            publisher: Publisher::Other,
            pub_year: year,
            pub_month: None,
            authors: vec![],
            references: vec![],
            n_references_total: 1,
            article_type: ArticleType::Research,
            das_candidates: vec![],
        }
    }

    #[test]
    fn merge_dedups_and_absorbs_ids() {
        let mut r1 = record("10.1/a", "PLOS ONE", 2014);
        r1.id.set(IdKind::Pmid, "111");
        let mut r2 = record("10.1/a", "PLOS ONE", 2014);
        r2.id.set(IdKind::Pmcid, "222");
        let merged = merge_records(vec![r1, r2]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].id.pmid.as_deref(), Some("111"));
        assert_eq!(merged[0].id.pmcid.as_deref(), Some("222"));
    }

    #[test]
    fn merge_keeps_first_seen_metadata() {
        let r1 = record("10.1/a", "PLOS ONE", 2014);
        let r2 = record("10.1/a", "PLOS Biology", 2015);
        let merged = merge_records(vec![r1, r2]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].journal_title, "PLOS ONE");
        assert_eq!(merged[0].pub_year, 2014);
    }

    #[test]
    fn filter_keeps_plos_research_drops_editorials_and_unknowns() {
        let table = JournalPolicyTable::for_tests();
        let plos = record("10.1/a", "PLOS ONE", 2014);
        let mut trials = record("10.1/b", "Trials", 2014);
        trials.article_type = ArticleType::Editorial;
        let unknown = record("10.1/c", "Nature Communications", 2014);
        let kept = filter_analysis_set(&[plos, trials, unknown], &table);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].publisher, Publisher::Plos);
    }

    #[test]
    fn filter_keeps_bmc_list_journals() {
        let table = JournalPolicyTable::for_tests();
        let r = record("10.1/d", "Trials", 2014);
        let kept = filter_analysis_set(&[r], &table);
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].publisher, Publisher::Bmc);
    }
}
