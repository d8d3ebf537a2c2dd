//! Data availability statement extraction and policy-regime flags.
//!
//! Extraction is rule-driven: an ordered list of (publisher, match kind,
//! pattern) entries. For PLOS the dedicated data-availability metadata
//! element is checked before sections titled "Data Availability"; for BMC
//! the "Availability of data and materials" / "Availability of supporting
//! data" sections are matched. Title comparison normalizes case, trims
//! trailing colons and periods, and collapses internal whitespace.

use crate::ingest::{ArticleId, ArticleRecord, JournalPolicyTable, Publisher};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// The four availability categories: 0 not available, 1 available on
/// request, 2 within the paper and supplementary files, 3 deposited in a
/// repository.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Category {
    NotAvailable,
    OnRequest,
    InPaper,
    InRepository,
}

pub const CATEGORIES: [Category; 4] =
    [Category::NotAvailable, Category::OnRequest, Category::InPaper, Category::InRepository];

impl Category {
    pub fn as_u8(self) -> u8 {
        match self {
            Category::NotAvailable => 0,
            Category::OnRequest => 1,
            Category::InPaper => 2,
            Category::InRepository => 3,
        }
    }

    pub fn index(self) -> usize {
        self.as_u8() as usize
    }
}

impl TryFrom<u8> for Category {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            0 => Ok(Category::NotAvailable),
            1 => Ok(Category::OnRequest),
            2 => Ok(Category::InPaper),
            3 => Ok(Category::InRepository),
            other => Err(format!("DAS category must be 0-3, got {other}")),
        }
    }
}

impl From<Category> for u8 {
    fn from(c: Category) -> u8 {
        c.as_u8()
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DasSource {
    PlosCustomMeta,
    PlosSection,
    BmcSection,
}

/// An extracted statement. `category` is filled by classification (or a
/// manual label).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DasStatement {
    pub article_id: ArticleId,
    pub text: String,
    pub source: DasSource,
    pub section_title: String,
    pub category: Option<Category>,
}

/// Where a candidate was found in the document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    MetaElement,
    SectionTitle,
}

/// Section or metadata element harvested at parse time because its title
/// matched an extraction rule pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DasCandidate {
    pub kind: MatchKind,
    pub title: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRule {
    pub publisher: Publisher,
    pub match_kind: MatchKind,
    pub pattern: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionRules {
    pub version: u32,
    #[serde(rename = "rule")]
    pub rules: Vec<ExtractionRule>,
}

impl Default for ExtractionRules {
    /// The shipped defaults: PLOS data-availability metadata element,
    /// then PLOS "Data Availability" sections, then the two BMC section
    /// styles.
    fn default() -> Self {
        let rule = |publisher, match_kind, pattern: &str| ExtractionRule {
            publisher,
            match_kind,
            pattern: pattern.to_string(),
        };
        ExtractionRules {
            version: 1,
            rules: vec![
                rule(Publisher::Plos, MatchKind::MetaElement, "Data Availability"),
                rule(Publisher::Plos, MatchKind::SectionTitle, "Data Availability"),
                rule(Publisher::Bmc, MatchKind::SectionTitle, "Availability of data and materials"),
                rule(Publisher::Bmc, MatchKind::SectionTitle, "Availability of supporting data"),
            ],
        }
    }
}

impl ExtractionRules {
    pub fn load(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let contents =
            std::fs::read_to_string(path).map_err(|e| Error::io(display.clone(), e))?;
        toml::from_str(&contents).map_err(|e| Error::bad_input(display, e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("rules serialize")
    }

    /// Does any rule pattern match this element title? Used at parse time
    /// to decide which sections to keep as candidates.
    pub fn any_pattern_matches(&self, kind: MatchKind, title: &str) -> bool {
        let title = normalize_section_title(title);
        self.rules
            .iter()
            .any(|r| r.match_kind == kind && normalize_section_title(&r.pattern) == title)
    }
}

/// Lowercase, collapse internal whitespace, trim trailing colons and
/// periods.
pub fn normalize_section_title(title: &str) -> String {
    let collapsed = title.split_whitespace().collect::<Vec<_>>().join(" ");
    collapsed.trim_end_matches([':', '.', ' ']).to_lowercase()
}

pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Apply the ordered rules to a record's harvested candidates; the first
/// match wins. Absence is a valid outcome.
pub fn extract_das(record: &ArticleRecord, rules: &ExtractionRules) -> Option<DasStatement> {
    for rule in &rules.rules {
        if rule.publisher != record.publisher {
            continue;
        }
        let pattern = normalize_section_title(&rule.pattern);
        let candidate = record.das_candidates.iter().find(|c| {
            c.kind == rule.match_kind && normalize_section_title(&c.title) == pattern
        });
        if let Some(c) = candidate {
            let text = normalize_whitespace(&c.text);
            if text.is_empty() {
                continue;
            }
            let source = match (record.publisher, rule.match_kind) {
                (Publisher::Plos, MatchKind::MetaElement) => DasSource::PlosCustomMeta,
                (Publisher::Plos, MatchKind::SectionTitle) => DasSource::PlosSection,
                (Publisher::Bmc, _) => DasSource::BmcSection,
                (Publisher::Other, _) => return None,
            };
            return Some(DasStatement {
                article_id: record.id.clone(),
                text,
                source,
                section_title: c.title.clone(),
                category: None,
            });
        }
    }
    None
}

/// Policy-regime flags for an article, compared at month granularity
/// with the June default. `required` when the publication date is on or
/// after the journal's mandate date; `encouraged` when it falls in the
/// encouraged-only regime. The two are never simultaneously true.
pub fn attach_policy_flags(
    record: &ArticleRecord,
    table: &JournalPolicyTable,
) -> (bool, bool) {
    let Some(policy) = table.get(&record.journal_title) else {
        return (false, false);
    };
    let date = record.pub_date();
    let required = matches!(policy.required_from, Some(r) if date >= r);
    let encouraged = !required
        && matches!(policy.encouraged_from, Some(e) if date >= e);
    (encouraged, required)
}
