//! DAS classifier training, model selection and application.
//!
//! Three classifier types are supported: multinomial naive Bayes over
//! bag-of-words counts, naive Bayes over TF-IDF weights, and a one-vs-rest
//! linear SVM over TF-IDF weights trained by deterministic stochastic
//! subgradient descent. Model selection runs a single stratified 80/20
//! split over the stop-word x stemming grid for all three.

mod eval;
mod nb;
mod svm;

pub use eval::{evaluate, ClassMetrics, EvalReport};
pub use nb::{train_nb, NBModel};
pub use svm::{train_svm, LinearModel, SvmParams};

use crate::das::{Category, CATEGORIES};
use crate::features::{vectorize_bow, vectorize_tfidf, SparseVector, Vocabulary};
use crate::text::{prepare, PrepConfig, StopwordList, TokenSequence};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

/// A manually categorized statement. `frequency` is the occurrence count
/// of this exact statement in the corpus, used for frequency-weighted
/// accuracy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub text: String,
    pub category: Category,
    pub frequency: u32,
}

/// Load `labels.csv`: columns text, category (0-3), frequency.
pub fn load_labels(path: &Path) -> Result<Vec<LabeledExample>> {
    let display = path.display().to_string();
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
    let mut out = Vec::new();
    for row in reader.deserialize::<(String, u8, u32)>() {
        let (text, category, frequency) =
            row.map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
        let category = Category::try_from(category)
            .map_err(|e| Error::bad_input(display.clone(), e))?;
        out.push(LabeledExample { text, category, frequency: frequency.max(1) });
    }
    Ok(out)
}

pub fn write_labels(path: &Path, labels: &[LabeledExample]) -> Result<()> {
    let display = path.display().to_string();
    let mut writer =
        csv::Writer::from_path(path).map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
    writer
        .write_record(["text", "category", "frequency"])
        .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
    for l in labels {
        writer
            .write_record([
                l.text.as_str(),
                &l.category.as_u8().to_string(),
                &l.frequency.to_string(),
            ])
            .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
    }
    writer.flush().map_err(|e| Error::io(display, e))?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Featurization {
    Bow,
    Tfidf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NbBow,
    NbTfidf,
    Svm,
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ClassifierKind::NbBow => "nb-bow",
            ClassifierKind::NbTfidf => "nb-tfidf",
            ClassifierKind::Svm => "svm",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "nb-bow" => Ok(ClassifierKind::NbBow),
            "nb-tfidf" => Ok(ClassifierKind::NbTfidf),
            "svm" => Ok(ClassifierKind::Svm),
            other => Err(format!("unknown classifier {other:?} (nb-bow, nb-tfidf, svm)")),
        }
    }
}

/// Shared featurization state embedded in every trained model, so
/// prediction needs nothing beyond the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelInputs {
    pub prep: PrepConfig,
    pub stopwords: Vec<String>,
    pub vocabulary: Vocabulary,
}

impl ModelInputs {
    pub fn stopword_list(&self) -> StopwordList {
        StopwordList::from_words(self.stopwords.iter().cloned())
    }

    pub fn prepare(&self, text: &str, stopwords: &StopwordList) -> TokenSequence {
        prepare(text, self.prep, stopwords)
    }

    pub fn featurize(
        &self,
        doc: &TokenSequence,
        featurization: Featurization,
    ) -> Result<SparseVector> {
        match featurization {
            Featurization::Bow => Ok(vectorize_bow(doc, &self.vocabulary)),
            Featurization::Tfidf => vectorize_tfidf(doc, &self.vocabulary),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TrainedModel {
    Nb(NBModel),
    Svm(LinearModel),
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            TrainedModel::Nb(m) => match m.featurization {
                Featurization::Bow => ClassifierKind::NbBow,
                Featurization::Tfidf => ClassifierKind::NbTfidf,
            },
            TrainedModel::Svm(_) => ClassifierKind::Svm,
        }
    }

    pub fn prep(&self) -> PrepConfig {
        match self {
            TrainedModel::Nb(m) => m.inputs.prep,
            TrainedModel::Svm(m) => m.inputs.prep,
        }
    }

    /// Deterministic category for a raw statement text.
    pub fn predict(&self, text: &str) -> Category {
        match self {
            TrainedModel::Nb(m) => m.predict(text),
            TrainedModel::Svm(m) => m.predict(text),
        }
    }

    /// Per-class decision scores (log posteriors for NB, linear scores
    /// for the SVM), indexed as the model's class list.
    pub fn scores(&self, text: &str) -> Vec<(Category, f64)> {
        match self {
            TrainedModel::Nb(m) => m.scores_text(text),
            TrainedModel::Svm(m) => m.scores_text(text),
        }
    }
}

/// Manual labels take precedence over model predictions; texts are
/// compared whitespace-normalized.
pub fn predict_with_manual(
    model: &TrainedModel,
    text: &str,
    manual: &HashMap<String, Category>,
) -> Category {
    let normalized = crate::das::normalize_whitespace(text);
    if let Some(&category) = manual.get(&normalized) {
        return category;
    }
    model.predict(&normalized)
}

/// Highest-score class with ties broken by the lowest class index.
pub(crate) fn argmax_category(scores: &[(Category, f64)]) -> Category {
    let mut best = scores[0];
    for &(cat, score) in &scores[1..] {
        if score > best.1 {
            best = (cat, score);
        }
    }
    best.0
}

pub(crate) fn represented_classes(examples: &[LabeledExample]) -> Vec<Category> {
    CATEGORIES.into_iter().filter(|c| examples.iter().any(|e| e.category == *c)).collect()
}

/// Single stratified split: within each category the examples are
/// shuffled by a seeded generator and the first 80% (floored, at least
/// one) go to training.
pub fn stratified_split(
    examples: &[LabeledExample],
    seed: u64,
) -> (Vec<usize>, Vec<usize>) {
    let mut train = Vec::new();
    let mut test = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for category in CATEGORIES {
        let mut indices: Vec<usize> = examples
            .iter()
            .enumerate()
            .filter(|(_, e)| e.category == category)
            .map(|(i, _)| i)
            .collect();
        if indices.is_empty() {
            continue;
        }
        indices.shuffle(&mut rng);
        let n_train = ((indices.len() as f64) * 0.8).floor() as usize;
        let n_train = n_train.max(1.min(indices.len()));
        train.extend_from_slice(&indices[..n_train]);
        test.extend_from_slice(&indices[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

fn select(examples: &[LabeledExample], indices: &[usize]) -> Vec<LabeledExample> {
    indices.iter().map(|&i| examples[i].clone()).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GridCell {
    pub classifier: ClassifierKind,
    pub prep: PrepConfig,
    pub accuracy: f64,
}

#[derive(Debug)]
pub struct GridSearchResult {
    pub best: TrainedModel,
    pub best_cell: GridCell,
    pub cells: Vec<GridCell>,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
}

const MIN_GRID_EXAMPLES: usize = 20;

fn train_one(
    kind: ClassifierKind,
    examples: &[LabeledExample],
    prep: PrepConfig,
    stopwords: &StopwordList,
    svm_params: SvmParams,
) -> Result<TrainedModel> {
    Ok(match kind {
        ClassifierKind::NbBow => {
            TrainedModel::Nb(train_nb(examples, Featurization::Bow, prep, stopwords)?)
        }
        ClassifierKind::NbTfidf => {
            TrainedModel::Nb(train_nb(examples, Featurization::Tfidf, prep, stopwords)?)
        }
        ClassifierKind::Svm => {
            TrainedModel::Svm(train_svm(examples, prep, stopwords, svm_params)?)
        }
    })
}

fn held_out_accuracy(model: &TrainedModel, test: &[LabeledExample]) -> f64 {
    if test.is_empty() {
        return 1.0;
    }
    let correct =
        test.iter().filter(|e| model.predict(&e.text) == e.category).count();
    correct as f64 / test.len() as f64
}

/// Tie order: higher accuracy, then SVM over NB-TFIDF over NB-BOW, then
/// stemming on, then stop-word filter off.
fn cell_preference(cell: &GridCell) -> (u8, u8, u8) {
    let kind_rank = match cell.classifier {
        ClassifierKind::Svm => 2,
        ClassifierKind::NbTfidf => 1,
        ClassifierKind::NbBow => 0,
    };
    (kind_rank, cell.prep.stemming as u8, (!cell.prep.stopword_filter) as u8)
}

/// Train all twelve grid cells on one stratified split and pick the best
/// by held-out accuracy.
pub fn grid_search(
    examples: &[LabeledExample],
    split_seed: u64,
    svm_params: SvmParams,
    stopwords: &StopwordList,
) -> Result<GridSearchResult> {
    if examples.len() < MIN_GRID_EXAMPLES {
        return Err(Error::TooFewExamples { min: MIN_GRID_EXAMPLES, got: examples.len() });
    }
    let (train_indices, test_indices) = stratified_split(examples, split_seed);
    let train_set = select(examples, &train_indices);
    let test_set = select(examples, &test_indices);

    let kinds = [ClassifierKind::NbBow, ClassifierKind::NbTfidf, ClassifierKind::Svm];
    let mut combos = Vec::new();
    for kind in kinds {
        for prep in PrepConfig::grid() {
            combos.push((kind, prep));
        }
    }
    use rayon::prelude::*;
    let trained: Vec<Result<(GridCell, TrainedModel)>> = combos
        .par_iter()
        .map(|&(kind, prep)| {
            let model = train_one(kind, &train_set, prep, stopwords, svm_params)?;
            let accuracy = held_out_accuracy(&model, &test_set);
            Ok((GridCell { classifier: kind, prep, accuracy }, model))
        })
        .collect();

    let mut cells = Vec::new();
    let mut best: Option<(GridCell, TrainedModel)> = None;
    for item in trained {
        let (cell, model) = item?;
        cells.push(cell.clone());
        best = match best {
            None => Some((cell, model)),
            Some((best_cell, best_model)) => {
                let better = (cell.accuracy, cell_preference(&cell))
                    > (best_cell.accuracy, cell_preference(&best_cell));
                if better {
                    Some((cell, model))
                } else {
                    Some((best_cell, best_model))
                }
            }
        };
    }
    let (best_cell, best_model) = best.expect("grid has cells");
    Ok(GridSearchResult {
        best: best_model,
        best_cell,
        cells,
        train_indices,
        test_indices,
    })
}

const MODEL_MAGIC: &[u8; 4] = b"DASM";
const MODEL_VERSION: u32 = 1;

/// Write the versioned model binary: magic, format version, payload
/// length, JSON payload.
pub fn write_model(path: &Path, model: &TrainedModel) -> Result<()> {
    let display = path.display().to_string();
    let payload =
        serde_json::to_vec(model).map_err(|e| Error::ModelFormat(e.to_string()))?;
    let mut file =
        std::fs::File::create(path).map_err(|e| Error::io(display.clone(), e))?;
    file.write_all(MODEL_MAGIC).map_err(|e| Error::io(display.clone(), e))?;
    file.write_all(&MODEL_VERSION.to_le_bytes())
        .map_err(|e| Error::io(display.clone(), e))?;
    file.write_all(&(payload.len() as u64).to_le_bytes())
        .map_err(|e| Error::io(display.clone(), e))?;
    file.write_all(&payload).map_err(|e| Error::io(display, e))?;
    Ok(())
}

pub fn read_model(path: &Path) -> Result<TrainedModel> {
    let display = path.display().to_string();
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(display.clone(), e))?;
    let mut magic = [0u8; 4];
    file.read_exact(&mut magic).map_err(|e| Error::io(display.clone(), e))?;
    if &magic != MODEL_MAGIC {
        return Err(Error::ModelFormat(format!("{display}: bad magic")));
    }
    let mut word = [0u8; 4];
    file.read_exact(&mut word).map_err(|e| Error::io(display.clone(), e))?;
    let version = u32::from_le_bytes(word);
    if version != MODEL_VERSION {
        return Err(Error::ModelFormat(format!(
            "{display}: unsupported model version {version}"
        )));
    }
    let mut len_bytes = [0u8; 8];
    file.read_exact(&mut len_bytes).map_err(|e| Error::io(display.clone(), e))?;
    let len = u64::from_le_bytes(len_bytes) as usize;
    let mut payload = vec![0u8; len];
    file.read_exact(&mut payload).map_err(|e| Error::io(display.clone(), e))?;
    serde_json::from_slice(&payload).map_err(|e| Error::ModelFormat(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn toy_examples() -> Vec<LabeledExample> {
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        vec![
            mk("no additional data available", 0),
            mk("no data available for this study", 0),
            mk("data not available due to privacy", 0),
            mk("no new data were created", 0),
            mk("data are not publicly shareable", 0),
            mk("data available from the authors on request", 1),
            mk("datasets available from the corresponding author on reasonable request", 1),
            mk("data may be requested from the authors", 1),
            mk("available upon request from the corresponding author", 1),
            mk("please contact the authors to request the datasets", 1),
            mk("all relevant data are within the paper", 2),
            mk("all data are included within the manuscript", 2),
            mk("data are within the paper and its supporting information files", 2),
            mk("all underlying data are contained within the manuscript", 2),
            mk("the data are provided in the supplementary files", 2),
            mk("data deposited in the ncbi repository under accession srr1151079", 3),
            mk("the sequences are available in genbank repository", 3),
            mk("data are deposited at dryad doi 10 5061 dryad", 3),
            mk("transcriptome deposited in the sequence read archive repository", 3),
            mk("all code is available at zenodo repository record 3470062", 3),
        ]
    }

    #[test]
    fn stratified_split_is_seeded_and_stratified() {
        let examples = toy_examples();
        let (train1, test1) = stratified_split(&examples, 42);
        let (train2, test2) = stratified_split(&examples, 42);
        assert_eq!(train1, train2);
        assert_eq!(test1, test2);
        assert_eq!(train1.len(), 16);
        assert_eq!(test1.len(), 4);
        for category in CATEGORIES {
            let in_test = test1.iter().filter(|&&i| examples[i].category == category).count();
            assert_eq!(in_test, 1, "one test item per class");
        }
        let (train3, _) = stratified_split(&examples, 43);
        assert_ne!(train1, train3, "different seed, different split");
    }

    #[test]
    fn grid_search_needs_twenty_examples() {
        let examples: Vec<LabeledExample> = toy_examples().into_iter().take(10).collect();
        assert!(matches!(
            grid_search(&examples, 42, SvmParams::default(), &StopwordList::default()),
            Err(Error::TooFewExamples { .. })
        ));
    }

    /// Each class is marked by a dedicated keyword present in all of its
    /// documents, so every grid cell separates the held-out items.
    pub(crate) fn marker_examples() -> Vec<LabeledExample> {
        let mk = |text: String, c: u8| LabeledExample {
            text,
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let fillers = ["north", "south", "east", "west", "core"];
        let markers = ["alpha", "beta", "gamma", "delta"];
        let mut out = Vec::new();
        for (ci, marker) in markers.iter().enumerate() {
            for filler in fillers {
                out.push(mk(format!("{marker} data record {filler}"), ci as u8));
            }
        }
        out
    }

    #[test]
    fn grid_search_separable_corpus_tie_breaks_to_svm_stemming_on() {
        let examples = marker_examples();
        let result =
            grid_search(&examples, 42, SvmParams::default(), &StopwordList::default()).unwrap();
        assert_eq!(result.cells.len(), 12);
        // Every cell classifies the small separable corpus perfectly, so
        // the tie-break order decides.
        for cell in &result.cells {
            assert_eq!(cell.accuracy, 1.0, "{:?}", cell);
        }
        assert_eq!(result.best_cell.classifier, ClassifierKind::Svm);
        assert!(result.best_cell.prep.stemming);
        assert!(!result.best_cell.prep.stopword_filter);
    }

    #[test]
    fn stemming_separates_inflected_corpus() {
        // Class 0 uses inflected forms of "share"; class 1 uses
        // "deposit" forms. Without stemming the held-out inflections are
        // out-of-vocabulary; with stemming they collapse to the stems.
        let mk = |text: &str, c: u8| LabeledExample {
            text: text.to_string(),
            category: Category::try_from(c).unwrap(),
            frequency: 1,
        };
        let mut examples = Vec::new();
        let share_forms = ["shared", "sharing", "shares", "share", "shared"];
        let deposit_forms = ["deposited", "depositing", "deposits", "deposit", "deposited"];
        for i in 0..10 {
            examples.push(mk(&format!("record {}", share_forms[i % 5]), 0));
            examples.push(mk(&format!("record {}", deposit_forms[i % 5]), 1));
        }
        let result =
            grid_search(&examples, 7, SvmParams::default(), &StopwordList::default()).unwrap();
        assert!(result.best_cell.prep.stemming);
        let stem_on_beats_off = result
            .cells
            .iter()
            .filter(|c| c.classifier == ClassifierKind::Svm)
            .map(|c| (c.prep.stemming, c.accuracy))
            .collect::<Vec<_>>();
        let on = stem_on_beats_off
            .iter()
            .filter(|(s, _)| *s)
            .map(|(_, a)| *a)
            .fold(f64::MIN, f64::max);
        let off = stem_on_beats_off
            .iter()
            .filter(|(s, _)| !*s)
            .map(|(_, a)| *a)
            .fold(f64::MIN, f64::max);
        assert!(on >= off);
    }

    #[test]
    fn manual_labels_take_precedence() {
        let examples = toy_examples();
        let model = TrainedModel::Svm(
            train_svm(
                &examples,
                PrepConfig::new(false, true),
                &StopwordList::default(),
                SvmParams::default(),
            )
            .unwrap(),
        );
        let mut manual = HashMap::new();
        manual.insert(
            "no additional data available".to_string(),
            Category::InRepository,
        );
        let c = predict_with_manual(&model, "no  additional data\tavailable", &manual);
        assert_eq!(c, Category::InRepository);
        let c2 = predict_with_manual(&model, "all relevant data are within the paper", &manual);
        assert_eq!(c2, Category::InPaper);
    }

    #[test]
    fn model_file_roundtrip() {
        let examples = toy_examples();
        let model = TrainedModel::Nb(
            train_nb(
                &examples,
                Featurization::Tfidf,
                PrepConfig::new(false, false),
                &StopwordList::default(),
            )
            .unwrap(),
        );
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        write_model(&path, &model).unwrap();
        let loaded = read_model(&path).unwrap();
        assert_eq!(loaded, model);
        for e in &examples {
            assert_eq!(loaded.predict(&e.text), model.predict(&e.text));
        }
    }

    #[test]
    fn model_file_rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.bin");
        std::fs::write(&path, b"NOPExxxxxxxxxxxxxxxx").unwrap();
        assert!(matches!(read_model(&path), Err(Error::ModelFormat(_))));
    }

    #[test]
    fn labels_csv_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        let labels = toy_examples();
        write_labels(&path, &labels).unwrap();
        let loaded = load_labels(&path).unwrap();
        assert_eq!(loaded, labels);
    }
}
