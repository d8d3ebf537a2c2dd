//! One function per subcommand. Each reads and writes only its
//! documented store sections; emitted CSV artifacts land in the out
//! directory.

use crate::config::PipelineConfig;
use crate::{BuildTableArgs, RegressArgs, TrainArgs};
use anyhow::{anyhow, bail, Context as _, Result};
use dasmine::classify::{
    evaluate as evaluate_predictions, grid_search, predict_with_manual, train_nb, train_svm,
    ClassifierKind, Featurization, LabeledExample, SvmParams, TrainedModel,
};
use dasmine::das::{extract_das as extract_statement, Category, DasStatement, ExtractionRules};
use dasmine::graph::{
    build_author_profiles, build_citation_index, AuthorKey, AuthorProfile, CitationIndex,
    CutoffRule,
};
use dasmine::ingest::{filter_analysis_set, ingest_dir, ArticleRecord, JournalPolicyTable};
use dasmine::regress::{effect_size, encode_design, fit_ols, fit_robust, RobustOptions};
use dasmine::store::Store;
use dasmine::table::{build_table as assemble_table, FieldTaxonomy, TableInputs};
use dasmine::text::{PrepConfig, StopwordList};
use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

pub struct Context {
    pub config: PipelineConfig,
    pub out_dir: PathBuf,
}

impl Context {
    fn store(&self) -> Store {
        Store::open(&self.config.store)
    }

    fn open_existing_store(&self) -> Result<Store> {
        let store = self.store();
        if !store.exists() {
            bail!("store not found at {} (run ingest first)", self.config.store.display());
        }
        Ok(store)
    }

    fn ensure_out_dir(&self) -> Result<()> {
        std::fs::create_dir_all(&self.out_dir)
            .with_context(|| format!("creating {}", self.out_dir.display()))
    }

    fn journals(&self, flag: Option<PathBuf>) -> Result<JournalPolicyTable> {
        let path = flag
            .or_else(|| self.config.journals.clone())
            .ok_or_else(|| anyhow!("no journals.csv given (flag --journals or config)"))?;
        Ok(JournalPolicyTable::load_csv(&path)?)
    }

    fn rules(&self, flag: Option<PathBuf>) -> Result<ExtractionRules> {
        match flag.or_else(|| self.config.rules.clone()) {
            Some(path) => Ok(ExtractionRules::load(&path)?),
            None => Ok(ExtractionRules::default()),
        }
    }

    fn stopword_list(&self, flag: Option<&Path>) -> Result<StopwordList> {
        match flag.map(Path::to_path_buf).or_else(|| self.config.stopwords.clone()) {
            Some(path) => Ok(StopwordList::load(&path)?),
            None => Ok(StopwordList::default()),
        }
    }
}

pub fn ingest(
    ctx: &Context,
    input: &Path,
    journals: Option<PathBuf>,
    rules: Option<PathBuf>,
) -> Result<()> {
    if !input.is_dir() {
        bail!("input directory does not exist: {}", input.display());
    }
    let journals = ctx.journals(journals)?;
    let rules = ctx.rules(rules)?;
    let store = Store::create(&ctx.config.store)?;
    let _lock = store.lock_writer()?;
    let summary = ingest_dir(input, &rules, &journals)?;
    store.write_records(&summary.records)?;
    println!(
        "ingest: {} files read, {} records retained, {} rejected",
        summary.files_read,
        summary.records.len(),
        summary.rejections.len()
    );
    for (path, reason) in &summary.rejections {
        println!("  rejected {:?}: {}", reason, path.display());
    }
    Ok(())
}

pub fn extract_das(ctx: &Context, rules: Option<PathBuf>) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let _lock = store.lock_writer()?;
    let rules = ctx.rules(rules)?;
    let records = store.read_records()?;
    let journals_needed = records.iter().any(|r| r.publisher != dasmine::ingest::Publisher::Other);
    if !journals_needed {
        log::warn!("no PLOS/BMC records in store; nothing to extract");
    }
    // keep categories assigned by an earlier classify run when the
    // extracted text is unchanged
    let previous: HashMap<String, DasStatement> = match store.read_das() {
        Ok(existing) => existing
            .into_iter()
            .map(|s| (s.article_id.canonical_key(), s))
            .collect(),
        Err(_) => HashMap::new(),
    };
    let mut statements: Vec<DasStatement> = Vec::new();
    for record in &records {
        if let Some(mut statement) = extract_statement(record, &rules) {
            if let Some(old) = previous.get(&record.key()) {
                if old.text == statement.text {
                    statement.category = old.category;
                }
            }
            statements.push(statement);
        }
    }
    statements.sort_by_key(|s| s.article_id.canonical_key());
    store.write_das(&statements)?;
    let pct = if records.is_empty() {
        0.0
    } else {
        100.0 * statements.len() as f64 / records.len() as f64
    };
    println!(
        "extract-das: {} statements across {} records ({pct:.1}%)",
        statements.len(),
        records.len()
    );
    Ok(())
}

fn prep_from_flags(defaults: PrepConfig, args: &TrainArgs) -> PrepConfig {
    let mut prep = defaults;
    if args.stem {
        prep.stemming = true;
    }
    if args.no_stem {
        prep.stemming = false;
    }
    if args.stopwords {
        prep.stopword_filter = true;
    }
    if args.no_stopwords {
        prep.stopword_filter = false;
    }
    prep
}

pub fn train(ctx: &Context, args: &TrainArgs) -> Result<()> {
    let labels_path = args
        .labels
        .clone()
        .or_else(|| ctx.config.labels.clone())
        .ok_or_else(|| anyhow!("no labels.csv given (flag --labels or config)"))?;
    let labels = dasmine::classify::load_labels(&labels_path)?;
    let stopword_list = ctx.stopword_list(args.stopword_list.as_deref())?;
    let split_seed = args.seed.unwrap_or(ctx.config.seeds.split);
    let svm_params = SvmParams {
        lambda: args.lambda.unwrap_or(ctx.config.svm.lambda),
        epochs: args.epochs.unwrap_or(ctx.config.svm.epochs),
        seed: ctx.config.svm.seed,
    };
    println!(
        "train: {} labeled statements, seeds: split={split_seed} svm={} lambda={} epochs={}",
        labels.len(),
        svm_params.seed,
        svm_params.lambda,
        svm_params.epochs
    );

    let store = Store::create(&ctx.config.store)?;
    let _lock = store.lock_writer()?;
    let defaults = PrepConfig {
        stopword_filter: ctx.config.prep.stopword_filter,
        stemming: ctx.config.prep.stemming,
    };

    let (model, accuracy) = match args.classifier {
        Some(kind) => {
            let prep = prep_from_flags(defaults, args);
            let (train_idx, test_idx) =
                dasmine::classify::stratified_split(&labels, split_seed);
            let train_set: Vec<LabeledExample> =
                train_idx.iter().map(|&i| labels[i].clone()).collect();
            let model = match kind {
                ClassifierKind::NbBow => TrainedModel::Nb(train_nb(
                    &train_set,
                    Featurization::Bow,
                    prep,
                    &stopword_list,
                )?),
                ClassifierKind::NbTfidf => TrainedModel::Nb(train_nb(
                    &train_set,
                    Featurization::Tfidf,
                    prep,
                    &stopword_list,
                )?),
                ClassifierKind::Svm => {
                    TrainedModel::Svm(train_svm(&train_set, prep, &stopword_list, svm_params)?)
                }
            };
            let correct = test_idx
                .iter()
                .filter(|&&i| model.predict(&labels[i].text) == labels[i].category)
                .count();
            let accuracy = if test_idx.is_empty() {
                1.0
            } else {
                correct as f64 / test_idx.len() as f64
            };
            println!(
                "train: {kind} stem={} stopwords={} held-out accuracy {accuracy:.4} ({}/{} split)",
                prep.stemming,
                prep.stopword_filter,
                train_idx.len(),
                test_idx.len()
            );
            (model, accuracy)
        }
        None => {
            let result = grid_search(&labels, split_seed, svm_params, &stopword_list)?;
            for cell in &result.cells {
                println!(
                    "  grid {:>8} stem={:<5} stopwords={:<5} accuracy {:.4}",
                    cell.classifier.to_string(),
                    cell.prep.stemming,
                    cell.prep.stopword_filter,
                    cell.accuracy
                );
            }
            println!(
                "train: selected {} stem={} stopwords={} held-out accuracy {:.4} ({}/{} split)",
                result.best_cell.classifier,
                result.best_cell.prep.stemming,
                result.best_cell.prep.stopword_filter,
                result.best_cell.accuracy,
                result.train_indices.len(),
                result.test_indices.len()
            );
            let accuracy = result.best_cell.accuracy;
            (result.best, accuracy)
        }
    };

    store.write_labels(&labels)?;
    store.write_model(&model)?;
    let prep = model.prep();
    store.write_train_meta(&dasmine::store::TrainMeta {
        format_version: dasmine::store::FORMAT_VERSION,
        split_seed,
        svm_seed: svm_params.seed,
        lambda: svm_params.lambda,
        epochs: svm_params.epochs,
        classifier: model.kind().to_string(),
        stemming: prep.stemming,
        stopword_filter: prep.stopword_filter,
        held_out_accuracy: accuracy,
    })?;
    println!("train: model written to {}", store.section_path("model").display());
    Ok(())
}

pub fn classify(ctx: &Context) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let _lock = store.lock_writer()?;
    let model = store.read_model().map_err(|_| anyhow!("model not built: run train first"))?;
    let mut statements = store.read_das().map_err(|_| {
        anyhow!("das section not built: run extract-das first")
    })?;
    let manual: HashMap<String, Category> = match store.read_labels() {
        Ok(labels) => labels
            .into_iter()
            .map(|l| (dasmine::das::normalize_whitespace(&l.text), l.category))
            .collect(),
        Err(_) => HashMap::new(),
    };
    let mut counts = [0usize; 4];
    let mut manual_hits = 0usize;
    for statement in &mut statements {
        let normalized = dasmine::das::normalize_whitespace(&statement.text);
        if manual.contains_key(&normalized) {
            manual_hits += 1;
        }
        let category = predict_with_manual(&model, &statement.text, &manual);
        statement.category = Some(category);
        counts[category.index()] += 1;
    }
    store.write_das(&statements)?;
    println!(
        "classify: {} statements ({} via manual labels); categories 0={} 1={} 2={} 3={}",
        statements.len(),
        manual_hits,
        counts[0],
        counts[1],
        counts[2],
        counts[3]
    );
    Ok(())
}

pub fn evaluate(ctx: &Context) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let labels = store
        .read_labels()
        .map_err(|_| anyhow!("labels not in store: run train first"))?;
    let model = store.read_model().map_err(|_| anyhow!("model not built: run train first"))?;
    // use the split the model was actually trained with
    let split_seed = store
        .read_train_meta()
        .map(|m| m.split_seed)
        .unwrap_or(ctx.config.seeds.split);
    let (_, test_idx) = dasmine::classify::stratified_split(&labels, split_seed);
    let gold: Vec<Category> = test_idx.iter().map(|&i| labels[i].category).collect();
    let predictions: Vec<Category> =
        test_idx.iter().map(|&i| model.predict(&labels[i].text)).collect();
    let frequencies: Vec<u32> = test_idx.iter().map(|&i| labels[i].frequency).collect();
    let report = evaluate_predictions(&predictions, &gold, Some(&frequencies))?;
    print!("{}", report.to_text());
    ctx.ensure_out_dir()?;
    let path = ctx.out_dir.join("classification_report.csv");
    crate::reports::write_classification_report(&path, &report)?;
    println!("evaluate: report written to {}", path.display());
    Ok(())
}

fn load_or_build_graph(
    store: &Store,
    records: &[ArticleRecord],
) -> Result<(BTreeMap<AuthorKey, AuthorProfile>, CitationIndex)> {
    let have_both = store.has_section("authors") && store.has_section("citations");
    if have_both {
        let profiles = store.read_authors()?;
        let index = store.read_citations()?;
        let map = profiles.into_iter().map(|p| (p.key.clone(), p)).collect();
        return Ok((map, index));
    }
    let profiles = build_author_profiles(records);
    let index = build_citation_index(records);
    let flat: Vec<AuthorProfile> = profiles.values().cloned().collect();
    store.write_authors(&flat)?;
    store.write_citations(&index)?;
    println!(
        "graph: {} author profiles, {} citation edges",
        profiles.len(),
        index.n_edges()
    );
    Ok((profiles, index))
}

pub fn build_table(ctx: &Context, args: &BuildTableArgs) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let _lock = store.lock_writer()?;
    let journals = ctx.journals(args.journals.clone())?;
    let taxonomy = match args.taxonomy.clone().or_else(|| ctx.config.taxonomy.clone()) {
        Some(path) => FieldTaxonomy::load_csv(&path)?,
        None => {
            log::warn!("no taxonomy.csv given; all journals map to Unclassified");
            FieldTaxonomy::default()
        }
    };
    let records = store.read_records()?;
    if records.is_empty() {
        bail!("store has no records");
    }
    let das = store
        .read_das()
        .map_err(|_| anyhow!("das section not built: run extract-das first"))?;
    let das_by_key: HashMap<String, DasStatement> = das
        .into_iter()
        .map(|s| (s.article_id.canonical_key(), s))
        .collect();
    let (profiles, index) = load_or_build_graph(&store, &records)?;
    let analysis = filter_analysis_set(&records, &journals);
    let corpus_end_year = records.iter().map(|r| r.pub_year).max().unwrap();
    let window = args.window.unwrap_or(ctx.config.window_years);
    let cutoff_rule = if args.h_cutoff_inclusive {
        CutoffRule::Inclusive
    } else {
        CutoffRule::Strict
    };
    let inputs = TableInputs {
        analysis_records: &analysis,
        das: &das_by_key,
        index: &index,
        profiles: &profiles,
        policy: &journals,
        taxonomy: &taxonomy,
        corpus_end_year,
        cutoff_rule,
    };
    let rows = assemble_table(&inputs, window);
    if rows.is_empty() {
        bail!(
            "no rows eligible for a {window}-year window (corpus ends {corpus_end_year})"
        );
    }
    store.write_table(&rows)?;
    ctx.ensure_out_dir()?;
    let dataset = ctx.out_dir.join("dataset.csv");
    crate::reports::write_dataset_csv(&dataset, &rows)?;
    let with_das = rows.iter().filter(|r| r.das_category.is_some()).count();
    println!(
        "build-table: window={window}y, corpus end {corpus_end_year}, {} analysis articles, {} rows ({} with DAS); dataset at {}",
        analysis.len(),
        rows.len(),
        with_das,
        dataset.display()
    );
    Ok(())
}

pub fn regress(ctx: &Context, args: &RegressArgs) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let rows = store
        .read_table()
        .map_err(|_| anyhow!("table not built: run build-table first"))?;
    let window = args.window.unwrap_or(ctx.config.window_years);
    if let Some(first) = rows.first() {
        if first.window_years != window {
            bail!(
                "table was built for a {}-year window; rebuild with build-table --window {window}",
                first.window_years
            );
        }
    }
    let (design, response) = encode_design(&rows)?;
    let ols = fit_ols(&design, &response)?;
    let robust = fit_robust(&design, &response, RobustOptions::default())?;
    if !robust.converged {
        log::warn!("robust fit did not converge; reporting last iterate");
    }

    let text = crate::reports::regression_text(&design, &ols, &robust);
    print!("{text}");

    let mean_citations =
        rows.iter().map(|r| f64::from(r.n_cit)).sum::<f64>() / rows.len() as f64;
    if mean_citations > 0.0 {
        if let Some(c) = ols.coefficient("C(das_category)3") {
            let e = effect_size(c.estimate, c.std_error, mean_citations)?;
            println!(
                "effect: repository-linked DAS (category 3) implies {:+.2}% (+/- {:.2}pp) citations over the {:.2} mean rate",
                e.percent, e.half_band_percent, mean_citations
            );
        }
    }

    ctx.ensure_out_dir()?;
    let csv_path = ctx.out_dir.join("regression.csv");
    crate::reports::write_regression_csv(&csv_path, &design, &ols, &robust)?;
    std::fs::write(ctx.out_dir.join("regression.txt"), &text)?;
    println!("regress: coefficient table written to {}", csv_path.display());
    Ok(())
}

pub fn report(ctx: &Context) -> Result<()> {
    let store = ctx.open_existing_store()?;
    let records = store.read_records()?;
    let das = store
        .read_das()
        .map_err(|_| anyhow!("das section not built: run extract-das first"))?;
    let rows = store
        .read_table()
        .map_err(|_| anyhow!("table not built: run build-table first"))?;
    ctx.ensure_out_dir()?;

    let over_time = ctx.out_dir.join("das_over_time.csv");
    crate::reports::write_das_over_time(&over_time, &records, &das)?;
    let descriptives = ctx.out_dir.join("descriptives.csv");
    crate::reports::write_descriptives(&descriptives, &rows)?;
    let correlations = ctx.out_dir.join("correlations.csv");
    crate::reports::write_correlations(&correlations, &rows)?;
    println!(
        "report: wrote {}, {}, {}",
        over_time.display(),
        descriptives.display(),
        correlations.display()
    );
    Ok(())
}

pub fn export(ctx: &Context, what: &str, out: Option<PathBuf>) -> Result<()> {
    let store = ctx.open_existing_store()?;
    ctx.ensure_out_dir()?;
    let graph_built = store.has_section("authors") && store.has_section("citations");
    if !graph_built {
        let _lock = store.lock_writer()?;
        let records = store.read_records()?;
        load_or_build_graph(&store, &records)?;
    }
    match what {
        "authors" => {
            let profiles = store.read_authors()?;
            let path = out.unwrap_or_else(|| ctx.out_dir.join("authors.csv"));
            crate::reports::write_authors_csv(&path, &profiles)?;
            println!("export: {} authors to {}", profiles.len(), path.display());
        }
        "citations" => {
            let index = store.read_citations()?;
            let path = out.unwrap_or_else(|| ctx.out_dir.join("citations.csv"));
            let n = crate::reports::write_citations_csv(&path, &index)?;
            println!("export: {n} citation edges to {}", path.display());
        }
        other => bail!("unknown export target {other:?} (authors, citations)"),
    }
    Ok(())
}
