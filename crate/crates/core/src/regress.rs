//! Design-matrix encoding, OLS and robust least-squares estimation with
//! inference statistics, and effect-size interpretation.
//!
//! The model regresses ln(n_cit_Y + 1) on the article- and journal-level
//! covariates, with dummy coding for the DAS category (reference: no
//! DAS), the journal field (reference: lexicographically first field
//! present) and DAS-category x PLOS interactions for categories 1-3.
//!
//! OLS is solved by QR decomposition, never an explicit inverse; the
//! robust path is a Huber M-estimate fitted by iteratively reweighted
//! least squares with the scale re-estimated each iteration from the
//! median absolute deviation of the residuals.

use crate::das::Category;
use crate::table::RegressionRow;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub column_names: Vec<String>,
    pub data: DMatrix<f64>,
    pub das_reference: &'static str,
    pub field_reference: String,
}

impl DesignMatrix {
    pub fn n_rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.data.ncols()
    }
}

/// Encode the citation-prediction formula over the assembled rows,
/// returning the design matrix and the ln(n_cit + 1) response.
pub fn encode_design(rows: &[RegressionRow]) -> Result<(DesignMatrix, DVector<f64>)> {
    if rows.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut fields: Vec<String> = rows.iter().map(|r| r.journal_field.clone()).collect();
    fields.sort();
    fields.dedup();
    let field_reference = fields[0].clone();
    let field_levels: Vec<String> = fields.into_iter().skip(1).collect();

    let mut column_names = vec![
        "(Intercept)".to_string(),
        "ln_n_authors".to_string(),
        "ln_n_references_tot".to_string(),
        "p_year".to_string(),
        "p_month".to_string(),
        "ln_h_index_mean".to_string(),
        "h_index_median".to_string(),
    ];
    for c in crate::das::CATEGORIES {
        column_names.push(format!("C(das_category){}", c.as_u8()));
    }
    column_names.push("is_plos".to_string());
    column_names.push("das_encouraged".to_string());
    column_names.push("das_required".to_string());
    for f in &field_levels {
        column_names.push(format!("C(journal_field){f}"));
    }
    for c in [Category::OnRequest, Category::InPaper, Category::InRepository] {
        column_names.push(format!("C(das_category){}:is_plos", c.as_u8()));
    }

    let n = rows.len();
    let k = column_names.len();
    let mut data = DMatrix::zeros(n, k);
    let mut y = DVector::zeros(n);
    for (i, row) in rows.iter().enumerate() {
        let mut j = 0;
        let mut push = |data: &mut DMatrix<f64>, v: f64| {
            data[(i, j)] = v;
            j += 1;
        };
        push(&mut data, 1.0);
        push(&mut data, row.ln_n_authors);
        push(&mut data, row.ln_n_references_tot);
        push(&mut data, f64::from(row.p_year));
        push(&mut data, f64::from(row.p_month));
        push(&mut data, row.ln_h_index_mean);
        push(&mut data, row.h_index_median);
        for c in crate::das::CATEGORIES {
            push(&mut data, if row.das_category == Some(c) { 1.0 } else { 0.0 });
        }
        push(&mut data, if row.is_plos { 1.0 } else { 0.0 });
        push(&mut data, if row.das_encouraged { 1.0 } else { 0.0 });
        push(&mut data, if row.das_required { 1.0 } else { 0.0 });
        for f in &field_levels {
            push(&mut data, if &row.journal_field == f { 1.0 } else { 0.0 });
        }
        for c in [Category::OnRequest, Category::InPaper, Category::InRepository] {
            let v = if row.das_category == Some(c) && row.is_plos { 1.0 } else { 0.0 };
            push(&mut data, v);
        }
        y[i] = row.ln_n_cit;
        debug_assert_eq!(j, k);
    }

    // An all-zero column (a category with no rows) can never reach full
    // rank; report it by name rather than failing inside the solver.
    let zero_columns: Vec<String> = (0..k)
        .filter(|&j| (0..n).all(|i| data[(i, j)] == 0.0))
        .map(|j| column_names[j].clone())
        .collect();
    if !zero_columns.is_empty() {
        return Err(Error::RankDeficient(zero_columns));
    }

    Ok((
        DesignMatrix { column_names, data, das_reference: "none", field_reference },
        y,
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t_value: f64,
    pub p_value: f64,
}

impl Coefficient {
    /// Significance stars at the 0.1 / 0.05 / 0.01 levels.
    pub fn stars(&self) -> &'static str {
        if self.p_value < 0.01 {
            "***"
        } else if self.p_value < 0.05 {
            "**"
        } else if self.p_value < 0.1 {
            "*"
        } else {
            ""
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    Ols,
    Robust,
}

#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub method: FitMethod,
    pub n_observations: usize,
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub residual_std_error: f64,
    pub f_statistic: f64,
    pub f_df: (usize, usize),
    pub converged: bool,
    pub iterations: usize,
}

impl FitResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    pub fn estimates(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.estimate).collect()
    }
}

const RANK_TOLERANCE: f64 = 1e-10;

struct Solved {
    beta: DVector<f64>,
    xtx_inverse: DMatrix<f64>,
}

/// Least-squares solve through the QR factorization. Near-zero diagonal
/// entries of R mean linearly dependent columns.
fn solve_qr(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<Solved> {
    let qr = x.clone().qr();
    let r = qr.r();
    let scale = r.diagonal().amax();
    let dependent: Vec<String> = (0..r.nrows())
        .filter(|&j| r[(j, j)].abs() <= RANK_TOLERANCE * scale.max(1.0))
        .map(|j| names[j].clone())
        .collect();
    if !dependent.is_empty() {
        return Err(Error::RankDeficient(dependent));
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient(names.to_vec()))?;
    // (X'X)^-1 = R^-1 R^-T from the triangular factor
    let identity = DMatrix::identity(r.nrows(), r.ncols());
    let r_inv = r
        .solve_upper_triangular(&identity)
        .ok_or_else(|| Error::RankDeficient(names.to_vec()))?;
    let xtx_inverse = &r_inv * r_inv.transpose();
    Ok(Solved { beta, xtx_inverse })
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    if !t.is_finite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("valid t distribution");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

#[allow(clippy::too_many_arguments)]
fn inference(
    method: FitMethod,
    names: &[String],
    solved: &Solved,
    weights: Option<&DVector<f64>>,
    x: &DMatrix<f64>,
    y: &DVector<f64>,
    converged: bool,
    iterations: usize,
) -> FitResult {
    let n = x.nrows();
    let k = x.ncols();
    let df_resid = n - k;
    let fitted = x * &solved.beta;
    let unit = DVector::from_element(n, 1.0);
    let w = weights.unwrap_or(&unit);

    let w_total: f64 = w.sum();
    let y_bar = y.dot(w) / w_total;
    let mut rss = 0.0;
    let mut tss = 0.0;
    for i in 0..n {
        let r = y[i] - fitted[i];
        let c = y[i] - y_bar;
        rss += w[i] * r * r;
        tss += w[i] * c * c;
    }
    let sigma2 = rss / df_resid as f64;
    let r_squared = if tss > 0.0 { 1.0 - rss / tss } else { 1.0 };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / (df_resid as f64);
    let f_statistic = if k > 1 && rss > 0.0 {
        ((tss - rss) / (k as f64 - 1.0)) / (rss / df_resid as f64)
    } else if rss == 0.0 {
        f64::INFINITY
    } else {
        0.0
    };

    let coefficients = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = solved.beta[j];
            let variance = (sigma2 * solved.xtx_inverse[(j, j)]).max(0.0);
            let std_error = variance.sqrt();
            let t_value = if std_error > 0.0 { estimate / std_error } else { f64::INFINITY };
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                t_value,
                p_value: two_sided_p(t_value, df_resid as f64),
            }
        })
        .collect();

    FitResult {
        method,
        n_observations: n,
        coefficients,
        r_squared,
        adj_r_squared,
        residual_std_error: sigma2.sqrt(),
        f_statistic,
        f_df: (k - 1, df_resid),
        converged,
        iterations,
    }
}

/// Ordinary least squares with classical standard errors.
pub fn fit_ols(design: &DesignMatrix, y: &DVector<f64>) -> Result<FitResult> {
    let x = &design.data;
    if x.nrows() <= x.ncols() {
        return Err(Error::TooFewRows { rows: x.nrows(), cols: x.ncols() });
    }
    let solved = solve_qr(x, y, &design.column_names)?;
    Ok(inference(FitMethod::Ols, &design.column_names, &solved, None, x, y, true, 1))
}

#[derive(Debug, Clone, Copy)]
pub struct RobustOptions {
    /// Huber tuning constant; the 1.345 default gives ~95% efficiency
    /// under normal errors. An infinite value forces unit weights, which
    /// reproduces OLS.
    pub tuning_c: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RobustOptions {
    fn default() -> Self {
        RobustOptions { tuning_c: 1.345, tol: 1e-8, max_iter: 50 }
    }
}

impl RobustOptions {
    pub fn unit_weights() -> Self {
        RobustOptions { tuning_c: f64::INFINITY, ..Default::default() }
    }
}

fn mad_scale(residuals: &DVector<f64>) -> f64 {
    let mut values: Vec<f64> = residuals.iter().copied().collect();
    let (_, med, _, _) = crate::table::column_stats(&values);
    for v in &mut values {
        *v = (*v - med).abs();
    }
    let (_, mad, _, _) = crate::table::column_stats(&values);
    1.4826 * mad
}

/// Huber M-estimation by iteratively reweighted least squares.
/// Non-convergence within `max_iter` returns the last iterate with
/// `converged == false`.
pub fn fit_robust(
    design: &DesignMatrix,
    y: &DVector<f64>,
    options: RobustOptions,
) -> Result<FitResult> {
    let x = &design.data;
    let n = x.nrows();
    if n <= x.ncols() {
        return Err(Error::TooFewRows { rows: n, cols: x.ncols() });
    }

    let mut solved = solve_qr(x, y, &design.column_names)?;
    let mut weights = DVector::from_element(n, 1.0);
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=options.max_iter {
        iterations = iter;
        let residuals = y - x * &solved.beta;
        if options.tuning_c.is_infinite() {
            converged = true;
            break;
        }
        let scale = mad_scale(&residuals);
        if scale <= f64::EPSILON {
            converged = true;
            break;
        }
        for i in 0..n {
            let u = residuals[i] / scale;
            weights[i] = if u.abs() <= options.tuning_c {
                1.0
            } else {
                options.tuning_c / u.abs()
            };
        }
        // weighted solve on sqrt(w)-scaled rows
        let mut xw = x.clone();
        let mut yw = y.clone();
        for i in 0..n {
            let s = weights[i].sqrt();
            for j in 0..x.ncols() {
                xw[(i, j)] *= s;
            }
            yw[i] *= s;
        }
        let next = solve_qr(&xw, &yw, &design.column_names)?;
        let max_change = (&next.beta - &solved.beta).amax();
        solved = next;
        if max_change < options.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        log::warn!("robust fit did not converge in {} iterations", options.max_iter);
    }

    let weights_opt =
        if options.tuning_c.is_infinite() { None } else { Some(&weights) };
    Ok(inference(
        FitMethod::Robust,
        &design.column_names,
        &solved,
        weights_opt,
        x,
        y,
        converged,
        iterations,
    ))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EffectSize {
    /// Percent citation gain over the mean citation rate.
    pub percent: f64,
    /// Half the spread of the band from beta +/- one standard error.
    pub half_band_percent: f64,
}

/// Percent gain implied by a coefficient on the log scale:
/// (exp(beta) - 1) / mean_citations.
pub fn effect_size(beta: f64, std_error: f64, mean_citations: f64) -> Result<EffectSize> {
    if mean_citations <= 0.0 {
        return Err(Error::NonPositiveMean(mean_citations));
    }
    let gain = |b: f64| (b.exp() - 1.0) / mean_citations * 100.0;
    let percent = gain(beta);
    let half_band_percent = (gain(beta + std_error) - gain(beta - std_error)) / 2.0;
    Ok(EffectSize { percent, half_band_percent })
}
