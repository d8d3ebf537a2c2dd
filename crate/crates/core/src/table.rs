//! The regression dataset: one row per analysis-set article, plus
//! descriptive statistics and Pearson/Spearman correlation matrices over
//! the transformed model variables.

use crate::das::{attach_policy_flags, Category, DasStatement};
use crate::dates::DEFAULT_MONTH;
use crate::graph::{
    article_author_hstats, citations_in_window, AuthorKey, AuthorProfile, CitationIndex,
    CutoffRule,
};
use crate::ingest::{ArticleRecord, JournalPolicyTable};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::path::Path;

/// Journal-level field taxonomy. Unknown journals map to
/// "Unclassified" rather than being dropped.
#[derive(Debug, Clone, Default)]
pub struct FieldTaxonomy {
    by_title: HashMap<String, (String, String, String)>,
}

pub const UNCLASSIFIED_FIELD: &str = "Unclassified";

fn norm_title(title: &str) -> String {
    title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

impl FieldTaxonomy {
    /// `taxonomy.csv`: columns journal_title, domain, field, subfield.
    pub fn load_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
        let mut tax = FieldTaxonomy::default();
        for row in reader.deserialize::<(String, String, String, String)>() {
            let (title, domain, field, subfield) =
                row.map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
            tax.by_title.insert(norm_title(&title), (domain, field, subfield));
        }
        Ok(tax)
    }

    pub fn insert(&mut self, title: &str, domain: &str, field: &str, subfield: &str) {
        self.by_title
            .insert(norm_title(title), (domain.into(), field.into(), subfield.into()));
    }

    pub fn field_of(&self, journal_title: &str) -> String {
        match self.by_title.get(&norm_title(journal_title)) {
            Some((_, field, _)) => field.clone(),
            None => {
                log::warn!("journal {journal_title:?} not in taxonomy; using Unclassified");
                UNCLASSIFIED_FIELD.to_string()
            }
        }
    }
}

/// One article's model variables, transformed per the regression
/// formula. `das_category` is `None` for articles without a DAS (the
/// regression's reference level).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionRow {
    pub article_key: String,
    pub window_years: u32,
    pub n_cit: u32,
    pub ln_n_cit: f64,
    pub n_cit_2: u32,
    pub n_cit_3: u32,
    pub n_cit_5: u32,
    pub n_cit_tot: u32,
    pub n_authors: u32,
    pub ln_n_authors: f64,
    pub n_references_tot: u32,
    pub ln_n_references_tot: f64,
    pub p_year: i32,
    pub p_month: u32,
    pub h_index_mean: f64,
    pub ln_h_index_mean: f64,
    pub h_index_median: f64,
    pub das_category: Option<Category>,
    pub is_plos: bool,
    pub das_encouraged: bool,
    pub das_required: bool,
    pub journal_field: String,
}

pub struct TableInputs<'a> {
    pub analysis_records: &'a [ArticleRecord],
    pub das: &'a HashMap<String, DasStatement>,
    pub index: &'a CitationIndex,
    pub profiles: &'a BTreeMap<AuthorKey, AuthorProfile>,
    pub policy: &'a JournalPolicyTable,
    pub taxonomy: &'a FieldTaxonomy,
    /// Latest publication year in the full ingested store, which bounds
    /// citation accrual.
    pub corpus_end_year: i32,
    pub cutoff_rule: CutoffRule,
}

/// Assemble rows for articles whose publication year allows a full
/// `window_years` accrual window given the corpus end. Articles without
/// authors are skipped with a warning (H-index stats are undefined for
/// them).
pub fn build_table(inputs: &TableInputs<'_>, window_years: u32) -> Vec<RegressionRow> {
    use rayon::prelude::*;
    let eligible_until = inputs.corpus_end_year - window_years as i32;
    let mut rows: Vec<RegressionRow> = inputs
        .analysis_records
        .par_iter()
        .filter(|r| r.pub_year <= eligible_until)
        .filter_map(|r| build_row(inputs, r, window_years))
        .collect();
    rows.sort_by(|a, b| a.article_key.cmp(&b.article_key));
    rows
}

fn build_row(
    inputs: &TableInputs<'_>,
    record: &ArticleRecord,
    window_years: u32,
) -> Option<RegressionRow> {
    let key = record.key();
    let (h_index_mean, h_index_median) = match article_author_hstats(
        record,
        inputs.profiles,
        inputs.index,
        inputs.cutoff_rule,
    ) {
        Ok(stats) => stats,
        Err(e) => {
            log::warn!("skipping article in table: {e}");
            return None;
        }
    };
    let date = record.pub_date();
    let n_cit_2 = citations_in_window(&key, date, inputs.index, 2) as u32;
    let n_cit_3 = citations_in_window(&key, date, inputs.index, 3) as u32;
    let n_cit_5 = citations_in_window(&key, date, inputs.index, 5) as u32;
    let n_cit_tot = inputs.index.total_citations(&key) as u32;
    let n_cit = match window_years {
        2 => n_cit_2,
        3 => n_cit_3,
        5 => n_cit_5,
        y => citations_in_window(&key, date, inputs.index, y) as u32,
    };
    let (das_encouraged, das_required) = attach_policy_flags(record, inputs.policy);
    let das_category = match inputs.das.get(&key) {
        Some(statement) => {
            if statement.category.is_none() {
                log::warn!("article {key} has an unclassified DAS; run classification first");
            }
            statement.category
        }
        None => None,
    };
    Some(RegressionRow {
        article_key: key,
        window_years,
        n_cit,
        ln_n_cit: f64::from(n_cit + 1).ln(),
        n_cit_2,
        n_cit_3,
        n_cit_5,
        n_cit_tot,
        n_authors: record.authors.len() as u32,
        ln_n_authors: (record.authors.len() as f64).ln(),
        n_references_tot: record.n_references_total as u32,
        ln_n_references_tot: (record.n_references_total as f64 + 1.0).ln(),
        p_year: record.pub_year,
        p_month: record.pub_month.unwrap_or(DEFAULT_MONTH),
        h_index_mean,
        ln_h_index_mean: (h_index_mean + 1.0).ln(),
        h_index_median,
        das_category,
        is_plos: record.publisher == crate::ingest::Publisher::Plos,
        das_encouraged,
        das_required,
        journal_field: inputs.taxonomy.field_of(&record.journal_title),
    })
}

/// min / median / mean / max of one untransformed variable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariableStats {
    pub variable: String,
    pub min: f64,
    pub median: f64,
    pub mean: f64,
    pub max: f64,
}

/// The untransformed model variables reported by `descriptive_stats`, in
/// report order.
pub const DESCRIPTIVE_VARIABLES: [&str; 10] = [
    "n_cit_2",
    "n_cit_3",
    "n_cit_5",
    "n_cit_tot",
    "n_authors",
    "n_references_tot",
    "p_year",
    "p_month",
    "h_index_median",
    "h_index_mean",
];

fn descriptive_column(rows: &[RegressionRow], variable: &str) -> Vec<f64> {
    rows.iter()
        .map(|r| match variable {
            "n_cit_2" => f64::from(r.n_cit_2),
            "n_cit_3" => f64::from(r.n_cit_3),
            "n_cit_5" => f64::from(r.n_cit_5),
            "n_cit_tot" => f64::from(r.n_cit_tot),
            "n_authors" => f64::from(r.n_authors),
            "n_references_tot" => f64::from(r.n_references_tot),
            "p_year" => f64::from(r.p_year),
            "p_month" => f64::from(r.p_month),
            "h_index_median" => r.h_index_median,
            "h_index_mean" => r.h_index_mean,
            other => unreachable!("unknown descriptive variable {other}"),
        })
        .collect()
}

pub fn descriptive_stats(rows: &[RegressionRow]) -> Result<Vec<VariableStats>> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(DESCRIPTIVE_VARIABLES
        .iter()
        .map(|name| {
            let values = descriptive_column(rows, name);
            let (min, median, mean, max) = column_stats(&values);
            VariableStats { variable: name.to_string(), min, median, mean, max }
        })
        .collect())
}

/// Selection-based median; full sort is reserved for the test oracle.
pub fn column_stats(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len();
    debug_assert!(n > 0);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut buf = values.to_vec();
    let mid = n / 2;
    let (_, upper, _) =
        buf.select_nth_unstable_by(mid, |a, b| a.partial_cmp(b).expect("finite"));
    let upper = *upper;
    let median = if n % 2 == 1 {
        upper
    } else {
        let (_, lower, _) =
            buf.select_nth_unstable_by(mid - 1, |a, b| a.partial_cmp(b).expect("finite"));
        (*lower + upper) / 2.0
    };
    (min, median, mean, max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

/// Product-moment correlation; `None` when either column has zero
/// variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    if xs.is_empty() {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / (sxx * syy).sqrt())
}

/// Ranks with ties assigned the average rank of the tied block
/// (1-based).
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // block i..=j shares the average of ranks i+1..=j+1
        let avg = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's coefficient: Pearson on average-ranked data.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Option<f64> {
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// The transformed variables of the correlation report, in order.
pub const CORRELATION_VARIABLES: [&str; 7] = [
    "ln_n_cit",
    "ln_n_authors",
    "p_year",
    "p_month",
    "ln_h_index_mean",
    "h_index_median",
    "ln_n_references_tot",
];

pub fn correlation_column(rows: &[RegressionRow], variable: &str) -> Vec<f64> {
    rows.iter()
        .map(|r| match variable {
            "ln_n_cit" => r.ln_n_cit,
            "ln_n_authors" => r.ln_n_authors,
            "p_year" => f64::from(r.p_year),
            "p_month" => f64::from(r.p_month),
            "ln_h_index_mean" => r.ln_h_index_mean,
            "h_index_median" => r.h_index_median,
            "ln_n_references_tot" => r.ln_n_references_tot,
            other => unreachable!("unknown correlation variable {other}"),
        })
        .collect()
}

/// Symmetric correlation matrix over the report variables. Cells are
/// `None` (undefined) when a column has zero variance, never NaN.
pub fn correlation_matrix(
    rows: &[RegressionRow],
    method: CorrelationMethod,
) -> Result<Vec<Vec<Option<f64>>>> {
    if rows.len() < 2 {
        return Err(Error::EmptyTable);
    }
    let columns: Vec<Vec<f64>> =
        CORRELATION_VARIABLES.iter().map(|v| correlation_column(rows, v)).collect();
    let k = columns.len();
    let mut matrix = vec![vec![None; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let cell = if i == j {
                // a defined diagonal requires nonzero variance
                pearson(&columns[i], &columns[i]).map(|_| 1.0)
            } else {
                match method {
                    CorrelationMethod::Pearson => pearson(&columns[i], &columns[j]),
                    CorrelationMethod::Spearman => spearman(&columns[i], &columns[j]),
                }
            };
            matrix[i][j] = cell;
            matrix[j][i] = cell;
        }
    }
    Ok(matrix)
}
