//! Corpus-level ingestion guarantees: retained-record invariants,
//! idempotence, parallel-equals-sequential, and single-statement
//! extraction.

use dasmine::das::{extract_das, ExtractionRules};
use dasmine::ingest::{
    collect_input_files, ingest_dir, merge_records, parse_article, JournalPolicyTable,
    ParseOutcome,
};
use dasmine::store::Store;
use dasmine::synth::fixture_corpus;
use std::collections::BTreeSet;
use std::io::Read;
use std::path::Path;

fn materialized_fixtures(dir: &Path) -> (ExtractionRules, JournalPolicyTable) {
    fixture_corpus(7).write_to(dir).unwrap();
    let rules = ExtractionRules::load(&dir.join("rules.toml")).unwrap();
    let journals = JournalPolicyTable::load_csv(&dir.join("journals.csv")).unwrap();
    (rules, journals)
}

#[test]
fn retained_records_satisfy_corpus_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let (rules, journals) = materialized_fixtures(dir.path());
    let summary = ingest_dir(&dir.path().join("corpus"), &rules, &journals).unwrap();
    assert_eq!(summary.records.len(), 200);
    assert_eq!(summary.rejections.len(), 3);
    for record in &summary.records {
        assert!(!record.id.is_empty(), "{}", record.key());
        assert!(record.pub_year >= 1900);
        assert!(record.n_references_total >= 1);
        assert!(record.references.len() <= record.n_references_total);
    }
    // the duplicated article merged: no two records share an identifier
    let mut seen = BTreeSet::new();
    for record in &summary.records {
        assert!(seen.insert(record.key()), "duplicate key {}", record.key());
    }
}

#[test]
fn ingest_is_idempotent_at_the_byte_level() {
    let dir = tempfile::tempdir().unwrap();
    let (rules, journals) = materialized_fixtures(dir.path());
    let corpus = dir.path().join("corpus");

    let store = Store::create(dir.path().join("store")).unwrap();
    let summary = ingest_dir(&corpus, &rules, &journals).unwrap();
    store.write_records(&summary.records).unwrap();
    let first = std::fs::read(store.section_path("records")).unwrap();

    let summary2 = ingest_dir(&corpus, &rules, &journals).unwrap();
    store.write_records(&summary2.records).unwrap();
    let second = std::fs::read(store.section_path("records")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn parallel_ingest_equals_sequential_fold() {
    let dir = tempfile::tempdir().unwrap();
    let (rules, journals) = materialized_fixtures(dir.path());
    let corpus = dir.path().join("corpus");
    let parallel = ingest_dir(&corpus, &rules, &journals).unwrap();

    // Sequential reference: parse files one by one in sorted order and
    // apply the same merge.
    let mut records = Vec::new();
    for path in collect_input_files(&corpus).unwrap() {
        let raw = std::fs::read(&path).unwrap();
        let bytes = if path.extension().and_then(|e| e.to_str()) == Some("gz") {
            let mut decoder = flate2::read::GzDecoder::new(raw.as_slice());
            let mut out = Vec::new();
            decoder.read_to_end(&mut out).unwrap();
            out
        } else {
            raw
        };
        if let ParseOutcome::Retained(record) = parse_article(&bytes, &rules).unwrap() {
            records.push(*record);
        }
    }
    let mut sequential = merge_records(records);
    for record in &mut sequential {
        record.publisher = dasmine::ingest::assign_publisher(&record.journal_title, &journals);
    }
    sequential.sort_by_key(|r| r.key());

    assert_eq!(parallel.records.len(), sequential.len());
    for (a, b) in parallel.records.iter().zip(&sequential) {
        assert_eq!(a.key(), b.key());
        assert_eq!(a.journal_title, b.journal_title);
        assert_eq!(a.n_references_total, b.n_references_total);
        assert_eq!(a.publisher, b.publisher);
    }
}

#[test]
fn gzip_members_are_ingested() {
    let dir = tempfile::tempdir().unwrap();
    let (rules, journals) = materialized_fixtures(dir.path());
    let corpus = dir.path().join("corpus");
    let gz_count = collect_input_files(&corpus)
        .unwrap()
        .iter()
        .filter(|p| p.extension().and_then(|e| e.to_str()) == Some("gz"))
        .count();
    assert_eq!(gz_count, 2);
    let summary = ingest_dir(&corpus, &rules, &journals).unwrap();
    // both compressed members are among the retained records
    assert_eq!(summary.records.len(), 200);
    assert!(summary.records.iter().any(|r| r.key() == "doi:10.6000/fix.007"));
    assert!(summary.records.iter().any(|r| r.key() == "doi:10.6000/fix.141"));
}

#[test]
fn at_most_one_statement_per_article() {
    let dir = tempfile::tempdir().unwrap();
    let (rules, journals) = materialized_fixtures(dir.path());
    let summary = ingest_dir(&dir.path().join("corpus"), &rules, &journals).unwrap();
    let mut seen = BTreeSet::new();
    let mut extracted = 0;
    for record in &summary.records {
        if let Some(statement) = extract_das(record, &rules) {
            extracted += 1;
            assert!(!statement.text.is_empty());
            assert!(
                seen.insert(statement.article_id.canonical_key()),
                "second statement for {}",
                record.key()
            );
        }
    }
    assert!(extracted > 50, "fixture corpus should carry plenty of statements");
}
