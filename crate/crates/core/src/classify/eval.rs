//! Per-class classification report: precision, recall, F1, specificity
//! and support, plus overall, support-weighted and frequency-weighted
//! summaries.

use crate::das::{Category, CATEGORIES};
use crate::{Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub category: Category,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub specificity: f64,
    pub support: usize,
    /// Set when the class had no predicted positives, in which case
    /// precision is reported as 0 by convention.
    pub no_predicted_positives: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub frequency_weighted_accuracy: f64,
    pub n: usize,
}

/// Compare predictions against gold labels. `frequencies`, when given,
/// weights each test item by its corpus occurrence count for the
/// frequency-weighted accuracy (otherwise that equals plain accuracy).
pub fn evaluate(
    predictions: &[Category],
    gold: &[Category],
    frequencies: Option<&[u32]>,
) -> Result<EvalReport> {
    if predictions.len() != gold.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            gold: gold.len(),
        });
    }
    if gold.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if let Some(f) = frequencies {
        if f.len() != gold.len() {
            return Err(Error::LengthMismatch { predictions: f.len(), gold: gold.len() });
        }
    }
    let n = gold.len();
    let mut per_class = Vec::with_capacity(CATEGORIES.len());
    for category in CATEGORIES {
        let mut tp = 0usize;
        let mut fp = 0usize;
        let mut fn_ = 0usize;
        let mut tn = 0usize;
        for (p, g) in predictions.iter().zip(gold) {
            match (*p == category, *g == category) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        debug_assert_eq!(tp + fp + fn_ + tn, n);
        let no_predicted_positives = tp + fp == 0;
        let precision = if no_predicted_positives { 0.0 } else { tp as f64 / (tp + fp) as f64 };
        let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let specificity = if tn + fp == 0 { 0.0 } else { tn as f64 / (tn + fp) as f64 };
        per_class.push(ClassMetrics {
            category,
            precision,
            recall,
            f1,
            specificity,
            support: tp + fn_,
            no_predicted_positives,
        });
    }

    let correct = predictions.iter().zip(gold).filter(|(p, g)| p == g).count();
    let accuracy = correct as f64 / n as f64;
    let weight = |m: &ClassMetrics| m.support as f64 / n as f64;
    let weighted_precision = per_class.iter().map(|m| weight(m) * m.precision).sum();
    let weighted_recall = per_class.iter().map(|m| weight(m) * m.recall).sum();
    let weighted_f1 = per_class.iter().map(|m| weight(m) * m.f1).sum();

    let frequency_weighted_accuracy = match frequencies {
        Some(freqs) => {
            let total: f64 = freqs.iter().map(|&f| f64::from(f)).sum();
            let hit: f64 = predictions
                .iter()
                .zip(gold)
                .zip(freqs)
                .filter(|((p, g), _)| p == g)
                .map(|(_, &f)| f64::from(f))
                .sum();
            if total > 0.0 {
                hit / total
            } else {
                accuracy
            }
        }
        None => accuracy,
    };

    Ok(EvalReport {
        per_class,
        accuracy,
        weighted_precision,
        weighted_recall,
        weighted_f1,
        frequency_weighted_accuracy,
        n,
    })
}

impl EvalReport {
    /// Aligned text table in the classification-report layout.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("category  precision  recall  f1-score  specificity  support\n");
        for m in &self.per_class {
            out.push_str(&format!(
                "{:>8}  {:>9.2}  {:>6.2}  {:>8.2}  {:>11.2}  {:>7}\n",
                m.category.as_u8(),
                m.precision,
                m.recall,
                m.f1,
                m.specificity,
                m.support
            ));
        }
        out.push_str(&format!(
            "accuracy {:.2}  weighted precision {:.2}  recall {:.2}  f1 {:.2}  freq-weighted accuracy {:.2}\n",
            self.accuracy,
            self.weighted_precision,
            self.weighted_recall,
            self.weighted_f1,
            self.frequency_weighted_accuracy
        ));
        out
    }
}
