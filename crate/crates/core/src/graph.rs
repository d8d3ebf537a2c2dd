//! Within-collection citation graph: author disambiguation, citation
//! resolution, month-windowed citation counts and the time-resolved
//! H-index.
//!
//! Two author mentions refer to the same individual when their
//! normalized given name and surname are both identical (lowercase,
//! whitespace collapsed). Citation edges exist only where a reference
//! carried a resolvable identifier matching a retained record;
//! self-citations of an article to itself are dropped.

use crate::dates::{months_between, YearMonth};
use crate::ingest::{ArticleRecord, IdKind, ID_PRIORITY};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AuthorKey {
    pub given_name: String,
    pub surname: String,
}

fn norm_name_part(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl AuthorKey {
    pub fn new(given_name: &str, surname: &str) -> Self {
        AuthorKey { given_name: norm_name_part(given_name), surname: norm_name_part(surname) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorProfile {
    pub key: AuthorKey,
    /// (article key, month-defaulted publication date), sorted by date
    /// then key.
    pub publications: Vec<(String, YearMonth)>,
}

/// Cited article key to citing (article key, month-defaulted date).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CitationIndex {
    edges: BTreeMap<String, Vec<(String, YearMonth)>>,
}

impl CitationIndex {
    pub fn citations_of(&self, article_key: &str) -> &[(String, YearMonth)] {
        self.edges.get(article_key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn total_citations(&self, article_key: &str) -> usize {
        self.citations_of(article_key).len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Vec<(String, YearMonth)>)> {
        self.edges.iter()
    }

    pub fn from_edges(edges: BTreeMap<String, Vec<(String, YearMonth)>>) -> Self {
        CitationIndex { edges }
    }
}

/// Resolve every identifier-bearing reference against the record set and
/// collect citation edges. Multiple references from one article to the
/// same target count once. Resolution runs as a parallel map over the
/// citing articles; the merged index is sorted, so the result does not
/// depend on thread count.
pub fn build_citation_index(records: &[ArticleRecord]) -> CitationIndex {
    use rayon::prelude::*;
    let mut by_id: HashMap<(IdKind, &str), usize> = HashMap::new();
    for (idx, record) in records.iter().enumerate() {
        for kind in ID_PRIORITY {
            if let Some(v) = record.id.get(kind) {
                by_id.entry((kind, v)).or_insert(idx);
            }
        }
    }
    let per_citing: Vec<Vec<(String, (String, YearMonth))>> = records
        .par_iter()
        .map(|citing| {
            let citing_key = citing.key();
            let citing_date = citing.pub_date();
            let mut seen: Vec<usize> = Vec::new();
            let mut out = Vec::new();
            for reference in &citing.references {
                let target = ID_PRIORITY
                    .iter()
                    .find_map(|&kind| reference.get(kind).and_then(|v| by_id.get(&(kind, v))));
                let Some(&target_idx) = target else { continue };
                let target_key = records[target_idx].key();
                if target_key == citing_key || seen.contains(&target_idx) {
                    continue;
                }
                seen.push(target_idx);
                out.push((target_key, (citing_key.clone(), citing_date)));
            }
            out
        })
        .collect();
    let mut edges: BTreeMap<String, Vec<(String, YearMonth)>> = BTreeMap::new();
    for group in per_citing {
        for (cited, edge) in group {
            edges.entry(cited).or_default().push(edge);
        }
    }
    for list in edges.values_mut() {
        list.sort();
    }
    CitationIndex { edges }
}

/// Citations accrued within `years` of publication: citing dates with
/// `months_between(pub, citing)` in `[0, 12 * years]`, endpoint
/// inclusive.
pub fn citations_in_window(
    article_key: &str,
    pub_date: YearMonth,
    index: &CitationIndex,
    years: u32,
) -> usize {
    let window = i64::from(years) * 12;
    index
        .citations_of(article_key)
        .iter()
        .filter(|(_, citing_date)| {
            let m = months_between(pub_date, *citing_date);
            (0..=window).contains(&m)
        })
        .count()
}

/// Group author mentions into profiles over the whole record set.
pub fn build_author_profiles(records: &[ArticleRecord]) -> BTreeMap<AuthorKey, AuthorProfile> {
    let mut profiles: BTreeMap<AuthorKey, AuthorProfile> = BTreeMap::new();
    for record in records {
        let key = record.key();
        let date = record.pub_date();
        for author in &record.authors {
            let akey = AuthorKey::new(&author.given_name, &author.surname);
            profiles
                .entry(akey.clone())
                .or_insert_with(|| AuthorProfile { key: akey, publications: Vec::new() })
                .publications
                .push((key.clone(), date));
        }
    }
    for profile in profiles.values_mut() {
        profile.publications.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        profile.publications.dedup();
    }
    profiles
}

/// Whether works dated exactly at the cutoff month count towards the
/// H-index. `Strict` (the default) excludes them: at publication time an
/// author's same-month output is treated as simultaneous, not prior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CutoffRule {
    #[default]
    Strict,
    Inclusive,
}

impl CutoffRule {
    fn admits(self, date: YearMonth, cutoff: YearMonth) -> bool {
        match self {
            CutoffRule::Strict => date < cutoff,
            CutoffRule::Inclusive => date <= cutoff,
        }
    }
}

/// Largest h such that h of the author's pre-cutoff papers each have at
/// least h pre-cutoff citations.
pub fn h_index_at(
    author: &AuthorProfile,
    cutoff: YearMonth,
    index: &CitationIndex,
    rule: CutoffRule,
) -> usize {
    let mut counts: Vec<usize> = author
        .publications
        .iter()
        .filter(|(_, date)| rule.admits(*date, cutoff))
        .map(|(key, _)| {
            index
                .citations_of(key)
                .iter()
                .filter(|(_, citing_date)| rule.admits(*citing_date, cutoff))
                .count()
        })
        .collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.iter().enumerate().take_while(|&(i, &c)| c > i).count()
}

/// Mean and median H-index of an article's authors at its publication
/// date. The median of an even count is the midpoint average.
pub fn article_author_hstats(
    record: &ArticleRecord,
    profiles: &BTreeMap<AuthorKey, AuthorProfile>,
    index: &CitationIndex,
    rule: CutoffRule,
) -> Result<(f64, f64)> {
    if record.authors.is_empty() {
        return Err(Error::AuthorlessArticle(record.key()));
    }
    let cutoff = record.pub_date();
    let mut hs: Vec<usize> = record
        .authors
        .iter()
        .map(|a| {
            let key = AuthorKey::new(&a.given_name, &a.surname);
            profiles.get(&key).map_or(0, |p| h_index_at(p, cutoff, index, rule))
        })
        .collect();
    hs.sort_unstable();
    let n = hs.len();
    let mean = hs.iter().sum::<usize>() as f64 / n as f64;
    let median = if n % 2 == 1 {
        hs[n / 2] as f64
    } else {
        (hs[n / 2 - 1] + hs[n / 2]) as f64 / 2.0
    };
    Ok((mean, median))
}
