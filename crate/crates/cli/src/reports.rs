//! CSV and text emitters for the pipeline's artifacts. All output is
//! deterministic: fixed column orders, sorted rows, shortest-roundtrip
//! float formatting.

use anyhow::{Context as _, Result};
use dasmine::classify::EvalReport;
use dasmine::das::DasStatement;
use dasmine::graph::{AuthorProfile, CitationIndex};
use dasmine::ingest::{ArticleRecord, Publisher};
use dasmine::regress::{DesignMatrix, FitResult};
use dasmine::table::{
    correlation_matrix, descriptive_stats, CorrelationMethod, RegressionRow,
    CORRELATION_VARIABLES,
};
use std::collections::BTreeMap;
use std::path::Path;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))
}

pub fn write_dataset_csv(path: &Path, rows: &[RegressionRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "article_key",
        "window_years",
        "n_cit",
        "ln_n_cit",
        "n_cit_2",
        "n_cit_3",
        "n_cit_5",
        "n_cit_tot",
        "n_authors",
        "ln_n_authors",
        "n_references_tot",
        "ln_n_references_tot",
        "p_year",
        "p_month",
        "h_index_mean",
        "ln_h_index_mean",
        "h_index_median",
        "das_category",
        "is_plos",
        "das_encouraged",
        "das_required",
        "journal_field",
    ])?;
    for r in rows {
        w.write_record([
            r.article_key.clone(),
            r.window_years.to_string(),
            r.n_cit.to_string(),
            r.ln_n_cit.to_string(),
            r.n_cit_2.to_string(),
            r.n_cit_3.to_string(),
            r.n_cit_5.to_string(),
            r.n_cit_tot.to_string(),
            r.n_authors.to_string(),
            r.ln_n_authors.to_string(),
            r.n_references_tot.to_string(),
            r.ln_n_references_tot.to_string(),
            r.p_year.to_string(),
            r.p_month.to_string(),
            r.h_index_mean.to_string(),
            r.ln_h_index_mean.to_string(),
            r.h_index_median.to_string(),
            r.das_category.map(|c| c.to_string()).unwrap_or_default(),
            (r.is_plos as u8).to_string(),
            (r.das_encouraged as u8).to_string(),
            (r.das_required as u8).to_string(),
            r.journal_field.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_classification_report(path: &Path, report: &EvalReport) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["category", "precision", "recall", "f1", "specificity", "support"])?;
    for m in &report.per_class {
        w.write_record([
            m.category.to_string(),
            format!("{:.4}", m.precision),
            format!("{:.4}", m.recall),
            format!("{:.4}", m.f1),
            format!("{:.4}", m.specificity),
            m.support.to_string(),
        ])?;
    }
    w.write_record([
        "overall".to_string(),
        format!("{:.4}", report.weighted_precision),
        format!("{:.4}", report.weighted_recall),
        format!("{:.4}", report.weighted_f1),
        String::new(),
        report.n.to_string(),
    ])?;
    w.write_record([
        "accuracy".to_string(),
        format!("{:.4}", report.accuracy),
        String::new(),
        String::new(),
        String::new(),
        format!("freq_weighted={:.4}", report.frequency_weighted_accuracy),
    ])?;
    w.flush()?;
    Ok(())
}

/// Yearly statement counts per journal group. "none" counts articles in
/// the group without a DAS.
pub fn write_das_over_time(
    path: &Path,
    records: &[ArticleRecord],
    das: &[DasStatement],
) -> Result<()> {
    let category_of: BTreeMap<String, Option<u8>> = das
        .iter()
        .map(|s| (s.article_id.canonical_key(), s.category.map(|c| c.as_u8())))
        .collect();
    let mut counts: BTreeMap<(String, i32, String), u64> = BTreeMap::new();
    for record in records {
        if record.publisher == Publisher::Other {
            continue;
        }
        let mut groups = vec![match record.publisher {
            Publisher::Plos => "PLOS".to_string(),
            Publisher::Bmc => "BMC".to_string(),
            Publisher::Other => unreachable!(),
        }];
        if record.publisher == Publisher::Plos {
            if record.journal_title.eq_ignore_ascii_case("plos one") {
                groups.push("PLOS ONE".to_string());
            } else {
                groups.push("PLOS other".to_string());
            }
        }
        groups.push(format!("journal:{}", record.journal_title));
        let category = match category_of.get(&record.key()) {
            Some(Some(c)) => c.to_string(),
            Some(None) => "unclassified".to_string(),
            None => "none".to_string(),
        };
        for group in groups {
            *counts.entry((group, record.pub_year, category.clone())).or_insert(0) += 1;
        }
    }
    let mut w = writer(path)?;
    w.write_record(["group", "year", "das_category", "n_articles"])?;
    for ((group, year, category), n) in counts {
        w.write_record([group, year.to_string(), category, n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_descriptives(path: &Path, rows: &[RegressionRow]) -> Result<()> {
    let stats = descriptive_stats(rows)?;
    let mut w = writer(path)?;
    w.write_record(["variable", "min", "median", "mean", "max"])?;
    for s in stats {
        w.write_record([
            s.variable,
            s.min.to_string(),
            s.median.to_string(),
            s.mean.to_string(),
            s.max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Correlation matrix in the report layout: Spearman coefficients above
/// the diagonal, Pearson below, blank diagonal. Undefined cells
/// (zero-variance columns) are written as NA.
pub fn write_correlations(path: &Path, rows: &[RegressionRow]) -> Result<()> {
    let pearson = correlation_matrix(rows, CorrelationMethod::Pearson)?;
    let spearman = correlation_matrix(rows, CorrelationMethod::Spearman)?;
    let k = CORRELATION_VARIABLES.len();
    let mut w = writer(path)?;
    let mut header = vec!["variable".to_string()];
    header.extend(CORRELATION_VARIABLES.iter().map(|v| v.to_string()));
    w.write_record(&header)?;
    for i in 0..k {
        let mut row = vec![CORRELATION_VARIABLES[i].to_string()];
        for j in 0..k {
            let cell = match i.cmp(&j) {
                std::cmp::Ordering::Equal => String::new(),
                std::cmp::Ordering::Less => match spearman[i][j] {
                    Some(v) => v.to_string(),
                    None => "NA".to_string(),
                },
                std::cmp::Ordering::Greater => match pearson[i][j] {
                    Some(v) => v.to_string(),
                    None => "NA".to_string(),
                },
            };
            row.push(cell);
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_regression_csv(
    path: &Path,
    design: &DesignMatrix,
    ols: &FitResult,
    robust: &FitResult,
) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "term",
        "ols_estimate",
        "ols_std_error",
        "ols_p_value",
        "ols_signif",
        "robust_estimate",
        "robust_std_error",
        "robust_p_value",
        "robust_signif",
    ])?;
    for (i, name) in design.column_names.iter().enumerate() {
        let o = &ols.coefficients[i];
        let r = &robust.coefficients[i];
        w.write_record([
            name.clone(),
            o.estimate.to_string(),
            o.std_error.to_string(),
            o.p_value.to_string(),
            o.stars().to_string(),
            r.estimate.to_string(),
            r.std_error.to_string(),
            r.p_value.to_string(),
            r.stars().to_string(),
        ])?;
    }
    let summary = [
        ("n_observations", ols.n_observations.to_string(), robust.n_observations.to_string()),
        ("r_squared", ols.r_squared.to_string(), String::new()),
        ("adj_r_squared", ols.adj_r_squared.to_string(), String::new()),
        (
            "residual_std_error",
            ols.residual_std_error.to_string(),
            robust.residual_std_error.to_string(),
        ),
        (
            "f_statistic",
            format!("{} (df = {}; {})", ols.f_statistic, ols.f_df.0, ols.f_df.1),
            String::new(),
        ),
    ];
    for (name, o, r) in summary {
        w.write_record([name.to_string(), o, String::new(), String::new(), String::new(), r, String::new(), String::new(), String::new()])?;
    }
    w.flush()?;
    Ok(())
}

/// Aligned two-column coefficient table with significance stars at the
/// 0.1 / 0.05 / 0.01 levels.
pub fn regression_text(design: &DesignMatrix, ols: &FitResult, robust: &FitResult) -> String {
    let mut out = String::new();
    let width = design
        .column_names
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(10)
        .max("term".len());
    out.push_str(&format!(
        "{:<width$}  {:>22}  {:>22}\n",
        "term", "OLS", "robust LS",
    ));
    for (i, name) in design.column_names.iter().enumerate() {
        let o = &ols.coefficients[i];
        let r = &robust.coefficients[i];
        out.push_str(&format!(
            "{:<width$}  {:>14.4} ({:.4}){:<3}  {:>11.4} ({:.4}){:<3}\n",
            name,
            o.estimate,
            o.std_error,
            o.stars(),
            r.estimate,
            r.std_error,
            r.stars()
        ));
    }
    out.push_str(&format!(
        "observations {}; R2 {:.4}; adjusted R2 {:.4}; residual SE {:.4}; F {:.3} (df = {}; {})\n",
        ols.n_observations,
        ols.r_squared,
        ols.adj_r_squared,
        ols.residual_std_error,
        ols.f_statistic,
        ols.f_df.0,
        ols.f_df.1
    ));
    out.push_str("signif: *** p<0.01, ** p<0.05, * p<0.1\n");
    out
}

pub fn write_authors_csv(path: &Path, profiles: &[AuthorProfile]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["given_name", "surname", "n_publications", "first_publication"])?;
    for p in profiles {
        let first = p
            .publications
            .first()
            .map(|(_, d)| d.to_string())
            .unwrap_or_default();
        w.write_record([
            p.key.given_name.clone(),
            p.key.surname.clone(),
            p.publications.len().to_string(),
            first,
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_citations_csv(path: &Path, index: &CitationIndex) -> Result<usize> {
    let mut w = writer(path)?;
    w.write_record(["cited", "citing", "citing_date"])?;
    let mut n = 0;
    for (cited, citing) in index.iter() {
        for (citing_key, date) in citing {
            w.write_record([cited.clone(), citing_key.clone(), date.to_string()])?;
            n += 1;
        }
    }
    w.flush()?;
    Ok(n)
}
