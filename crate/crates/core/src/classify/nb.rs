//! Multinomial naive Bayes with add-one smoothing. For the TF-IDF
//! featurization the fractional weights play the role of counts.

use super::{argmax_category, represented_classes, Featurization, LabeledExample, ModelInputs};
use crate::das::Category;
use crate::features::{SparseVector, Vocabulary};
use crate::text::{PrepConfig, StopwordList};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NBModel {
    pub inputs: ModelInputs,
    pub featurization: Featurization,
    pub classes: Vec<Category>,
    pub log_priors: Vec<f64>,
    /// Per class, per vocabulary index.
    pub log_likelihoods: Vec<Vec<f64>>,
}

pub fn train_nb(
    examples: &[LabeledExample],
    featurization: Featurization,
    prep: PrepConfig,
    stopwords: &StopwordList,
) -> Result<NBModel> {
    if examples.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let docs: Vec<_> = examples.iter().map(|e| crate::text::prepare(&e.text, prep, stopwords)).collect();
    let vocabulary = Vocabulary::build(&docs)?;
    let inputs = ModelInputs {
        prep,
        stopwords: stopwords.to_sorted_vec(),
        vocabulary,
    };
    let vectors: Vec<SparseVector> = docs
        .iter()
        .map(|d| inputs.featurize(d, featurization))
        .collect::<Result<_>>()?;
    let labels: Vec<Category> = examples.iter().map(|e| e.category).collect();
    Ok(fit_vectors(inputs, featurization, &vectors, &labels))
}

/// Fit from already-featurized vectors. Exposed so invariance properties
/// of the estimator itself (e.g. rescaling all vectors) can be exercised
/// directly.
pub fn fit_vectors(
    inputs: ModelInputs,
    featurization: Featurization,
    vectors: &[SparseVector],
    labels: &[Category],
) -> NBModel {
    let classes: Vec<Category> = {
        let examples: Vec<LabeledExample> = labels
            .iter()
            .map(|&category| LabeledExample { text: String::new(), category, frequency: 1 })
            .collect();
        represented_classes(&examples)
    };
    let v = inputs.vocabulary.len();
    let n = labels.len() as f64;
    let mut log_priors = Vec::with_capacity(classes.len());
    let mut log_likelihoods = Vec::with_capacity(classes.len());
    for &class in &classes {
        let member = |i: usize| labels[i] == class;
        let count = (0..labels.len()).filter(|&i| member(i)).count() as f64;
        log_priors.push((count / n).ln());
        let mut term_mass = vec![0.0f64; v];
        let mut total_mass = 0.0;
        for (i, vector) in vectors.iter().enumerate() {
            if !member(i) {
                continue;
            }
            for (idx, w) in vector.iter() {
                term_mass[idx] += w;
                total_mass += w;
            }
        }
        let denominator = total_mass + v as f64;
        let row: Vec<f64> =
            term_mass.iter().map(|&m| ((m + 1.0) / denominator).ln()).collect();
        log_likelihoods.push(row);
    }
    NBModel { inputs, featurization, classes, log_priors, log_likelihoods }
}

impl NBModel {
    /// Log-posterior scores (up to the shared evidence term) for a
    /// featurized document.
    pub fn scores_vector(&self, vector: &SparseVector) -> Vec<(Category, f64)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(ci, &class)| {
                let row = &self.log_likelihoods[ci];
                let score = self.log_priors[ci] + vector.dot_dense(row);
                (class, score)
            })
            .collect()
    }

    pub fn predict_vector(&self, vector: &SparseVector) -> Category {
        argmax_category(&self.scores_vector(vector))
    }

    pub fn scores_text(&self, text: &str) -> Vec<(Category, f64)> {
        let stopwords = self.inputs.stopword_list();
        let doc = self.inputs.prepare(text, &stopwords);
        let vector = self
            .inputs
            .featurize(&doc, self.featurization)
            .unwrap_or_default();
        self.scores_vector(&vector)
    }

    /// An all-out-of-vocabulary or empty text falls back to the prior
    /// argmax.
    pub fn predict(&self, text: &str) -> Category {
        argmax_category(&self.scores_text(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::tests::toy_examples;

    fn nb(featurization: Featurization) -> NBModel {
        train_nb(
            &toy_examples(),
            featurization,
            PrepConfig::new(false, false),
            &StopwordList::default(),
        )
        .unwrap()
    }

    #[test]
    fn empty_training_set_rejected() {
        assert!(matches!(
            train_nb(&[], Featurization::Bow, PrepConfig::default(), &StopwordList::default()),
            Err(Error::EmptyTrainingSet)
        ));
    }

    #[test]
    fn disjoint_vocabulary_classes_are_separable() {
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let examples = vec![
            mk("alpha alpha", 0),
            mk("alpha", 0),
            mk("beta beta", 1),
            mk("beta", 1),
        ];
        for featurization in [Featurization::Bow, Featurization::Tfidf] {
            let model = train_nb(
                &examples,
                featurization,
                PrepConfig::default(),
                &StopwordList::default(),
            )
            .unwrap();
            for e in &examples {
                assert_eq!(model.predict(&e.text), e.category);
            }
        }
    }

    #[test]
    fn uniform_class_counts_give_equal_priors() {
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let examples = vec![
            mk("a", 0),
            mk("b", 1),
            mk("c", 2),
            mk("d", 3),
        ];
        let model = train_nb(
            &examples,
            Featurization::Bow,
            PrepConfig::default(),
            &StopwordList::default(),
        )
        .unwrap();
        for lp in &model.log_priors {
            assert!((lp - (0.25f64).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn priors_and_likelihood_rows_are_distributions() {
        for featurization in [Featurization::Bow, Featurization::Tfidf] {
            let model = nb(featurization);
            let prior_sum: f64 = model.log_priors.iter().map(|lp| lp.exp()).sum();
            assert!((prior_sum - 1.0).abs() < 1e-9);
            for row in &model.log_likelihoods {
                let sum: f64 = row.iter().map(|l| l.exp()).sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hand_computed_posterior_three_docs() {
        // Docs: class0 = [x], class0 = [x, y], class1 = [y, y].
        // Vocabulary {x:0, y:1}, V = 2.
        // class0 counts: x=2, y=1, total=3; P(x|0)=(2+1)/(3+2)=3/5,
        // P(y|0)=2/5. class1 counts: y=2, total=2; P(x|1)=1/4, P(y|1)=3/4.
        // Priors: 2/3 and 1/3.
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let examples = vec![mk("x", 0), mk("x y", 0), mk("y y", 1)];
        let model = train_nb(
            &examples,
            Featurization::Bow,
            PrepConfig::default(),
            &StopwordList::default(),
        )
        .unwrap();
        let scores = model.scores_text("x y");
        let expect0 = (2.0f64 / 3.0).ln() + (3.0f64 / 5.0).ln() + (2.0f64 / 5.0).ln();
        let expect1 = (1.0f64 / 3.0).ln() + (1.0f64 / 4.0).ln() + (3.0f64 / 4.0).ln();
        assert!((scores[0].1 - expect0).abs() < 1e-12);
        assert!((scores[1].1 - expect1).abs() < 1e-12);
        assert_eq!(model.predict("x y"), Category::NotAvailable);
    }

    #[test]
    fn empty_text_falls_back_to_prior_argmax() {
        let model = nb(Featurization::Bow);
        // Class 2 does not dominate the toy corpus (all classes equal),
        // so the tie-break lands on the lowest class index.
        let query = "";
        let predicted = model.predict(query);
        let max_prior = model
            .log_priors
            .iter()
            .cloned()
            .fold(f64::MIN, f64::max);
        let first_argmax = model
            .classes
            .iter()
            .zip(&model.log_priors)
            .find(|(_, lp)| (**lp - max_prior).abs() < 1e-15)
            .map(|(c, _)| *c)
            .unwrap();
        assert_eq!(predicted, first_argmax);
    }

    #[test]
    fn scaling_all_tfidf_vectors_preserves_argmax() {
        // Equal-sized classes with disjoint discriminative vocabularies:
        // the smoothed likelihood ratio favors the right class for every
        // positive scale factor.
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let examples = [
            mk("data alpha request", 0),
            mk("data alpha contact", 0),
            mk("data beta repository", 1),
            mk("data beta accession", 1),
        ];
        let prep = PrepConfig::default();
        let stopwords = StopwordList::default();
        let docs: Vec<_> =
            examples.iter().map(|e| crate::text::prepare(&e.text, prep, &stopwords)).collect();
        let vocabulary = Vocabulary::build(&docs).unwrap();
        let inputs = ModelInputs {
            prep,
            stopwords: stopwords.to_sorted_vec(),
            vocabulary,
        };
        let base: Vec<SparseVector> = docs
            .iter()
            .map(|d| inputs.featurize(d, Featurization::Tfidf).unwrap())
            .collect();
        let labels: Vec<Category> = examples.iter().map(|e| e.category).collect();
        let reference = fit_vectors(inputs.clone(), Featurization::Tfidf, &base, &labels);
        let reference_preds: Vec<Category> =
            base.iter().map(|v| reference.predict_vector(v)).collect();
        for scale in [0.01, 0.5, 3.0, 100.0] {
            let scaled: Vec<SparseVector> = base.iter().map(|v| v.scale(scale)).collect();
            let model = fit_vectors(inputs.clone(), Featurization::Tfidf, &scaled, &labels);
            let preds: Vec<Category> =
                scaled.iter().map(|v| model.predict_vector(v)).collect();
            assert_eq!(preds, reference_preds, "scale {scale}");
        }
    }
}
