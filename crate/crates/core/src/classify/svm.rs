//! One-vs-rest linear SVM over TF-IDF features, trained by regularized
//! hinge-loss minimization with the Pegasos step schedule 1/(lambda*t).
//!
//! Training is bit-for-bit reproducible given (seed, epochs, lambda):
//! per-class example order comes from a seeded ChaCha shuffle. Exact
//! duplicate examples are collapsed before the descent with their
//! multiplicity folded into normalized instance weights, so duplicating
//! the whole training set (which only rescales the empirical loss)
//! leaves the learned decision function unchanged.

use super::{argmax_category, represented_classes, Featurization, LabeledExample, ModelInputs};
use crate::das::Category;
use crate::features::{SparseVector, Vocabulary};
use crate::text::{PrepConfig, StopwordList};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { lambda: 1e-4, epochs: 100, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub inputs: ModelInputs,
    pub classes: Vec<Category>,
    /// Per class: dense weight vector over the vocabulary.
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub params: SvmParams,
}

pub fn train_svm(
    examples: &[LabeledExample],
    prep: PrepConfig,
    stopwords: &StopwordList,
    params: SvmParams,
) -> Result<LinearModel> {
    if examples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let classes = represented_classes(examples);
    if classes.len() < 2 {
        return Err(Error::SingleClassTrainingSet);
    }

    // Collapse exact duplicates (first-seen order) and carry their
    // multiplicity as a normalized instance weight: uniform duplication
    // leaves every weight at 1.
    let mut unique: Vec<(&LabeledExample, f64)> = Vec::new();
    for e in examples {
        match unique
            .iter_mut()
            .find(|(u, _)| u.text == e.text && u.category == e.category)
        {
            Some((_, count)) => *count += 1.0,
            None => unique.push((e, 1.0)),
        }
    }
    let total = examples.len() as f64;
    let n_unique = unique.len() as f64;
    let instance_weights: Vec<f64> =
        unique.iter().map(|(_, count)| count * n_unique / total).collect();

    let docs: Vec<_> = unique
        .iter()
        .map(|(e, _)| crate::text::prepare(&e.text, prep, stopwords))
        .collect();
    let vocabulary = Vocabulary::build(&docs)?;
    let inputs = ModelInputs { prep, stopwords: stopwords.to_sorted_vec(), vocabulary };
    let vectors: Vec<SparseVector> = docs
        .iter()
        .map(|d| inputs.featurize(d, Featurization::Tfidf))
        .collect::<Result<_>>()?;
    let labels: Vec<Category> = unique.iter().map(|(e, _)| e.category).collect();

    let dim = inputs.vocabulary.len();
    let mut weights = Vec::with_capacity(classes.len());
    let mut biases = Vec::with_capacity(classes.len());
    for (ci, &class) in classes.iter().enumerate() {
        let targets: Vec<f64> =
            labels.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect();
        let (w, b) = pegasos(dim, &vectors, &targets, &instance_weights, params, ci as u64);
        weights.push(w);
        biases.push(b);
    }
    Ok(LinearModel { inputs, classes, weights, biases, params })
}

/// Primal stochastic subgradient descent on the hinge loss with L2
/// regularization. The bias rides along as a regularized constant
/// feature at index `dim`, so the 1/(lambda*t) schedule applies to it
/// uniformly.
fn pegasos(
    dim: usize,
    vectors: &[SparseVector],
    targets: &[f64],
    instance_weights: &[f64],
    params: SvmParams,
    class_offset: u64,
) -> (Vec<f64>, f64) {
    let mut w = vec![0.0f64; dim + 1];
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(
        params.seed ^ class_offset.wrapping_mul(0x9E37_79B9_7F4A_7C15),
    );
    let mut t: u64 = 1;
    for _ in 0..params.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let eta = 1.0 / (params.lambda * t as f64);
            let margin = targets[i] * (vectors[i].dot_dense(&w) + w[dim]);
            let shrink = 1.0 - eta * params.lambda;
            for wj in w.iter_mut() {
                *wj *= shrink;
            }
            if margin < 1.0 {
                let step = eta * instance_weights[i] * targets[i];
                for (idx, x) in vectors[i].iter() {
                    w[idx] += step * x;
                }
                w[dim] += step;
            }
            t += 1;
        }
    }
    let b = w[dim];
    w.truncate(dim);
    (w, b)
}

impl LinearModel {
    pub fn scores_vector(&self, vector: &SparseVector) -> Vec<(Category, f64)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(ci, &class)| (class, vector.dot_dense(&self.weights[ci]) + self.biases[ci]))
            .collect()
    }

    pub fn scores_text(&self, text: &str) -> Vec<(Category, f64)> {
        let stopwords = self.inputs.stopword_list();
        let doc = self.inputs.prepare(text, &stopwords);
        let vector = self
            .inputs
            .featurize(&doc, Featurization::Tfidf)
            .unwrap_or_default();
        self.scores_vector(&vector)
    }

    /// An all-out-of-vocabulary or empty text falls back to the bias
    /// argmax.
    pub fn predict(&self, text: &str) -> Category {
        argmax_category(&self.scores_text(text))
    }
}
