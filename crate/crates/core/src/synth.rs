//! Deterministic synthetic data: a labeled statement corpus templated
//! from the four category exemplars, random record sets for graph
//! oracles, and a small JATS fixture corpus for end-to-end runs.
//!
//! Everything here is seeded; the same seed always produces the same
//! bytes.

use crate::classify::LabeledExample;
use crate::das::Category;
use crate::ingest::{ArticleId, ArticleRecord, ArticleType, AuthorName, IdKind, Publisher};
use crate::{Error, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::Path;

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

fn accession(rng: &mut ChaCha8Rng) -> String {
    match rng.gen_range(0..4) {
        0 => format!("SRR{}", rng.gen_range(1_000_000..9_999_999)),
        1 => format!("PRJNA{}", rng.gen_range(100_000..999_999)),
        2 => format!("GSE{}", rng.gen_range(10_000..99_999)),
        _ => format!("E-MTAB-{}", rng.gen_range(1_000..9_999)),
    }
}

fn category0(rng: &mut ChaCha8Rng) -> String {
    let base = [
        "No additional data available",
        "No datasets were generated or analysed during the current study",
        "Data sharing is not applicable to this article as no datasets were generated",
        "No new data were created in this study",
        "The data are not publicly available due to privacy restrictions",
        "Data cannot be shared for ethical reasons",
        "No data are available for this article",
        "The datasets are not available because consent for sharing was not obtained",
        "Data are unavailable owing to patient confidentiality",
    ];
    let suffix = ["", "", " at this time", " for this study", " under the study protocol"];
    format!("{}{}.", pick(rng, &base), pick(rng, &suffix))
}

fn category1(rng: &mut ChaCha8Rng) -> String {
    let subject = [
        "The datasets",
        "The data",
        "All study data",
        "The raw data",
        "The full datasets",
        "The data supporting the conclusions of this article",
        "The datasets used and/or analysed during the current study",
        "The data that support the findings of this study",
        "Anonymised data",
    ];
    let verb = [
        "are available",
        "can be obtained",
        "may be requested",
        "will be made available",
        "are obtainable",
    ];
    let source = [
        "from the corresponding author",
        "from the authors",
        "from the first author",
        "from the study coordinating centre",
    ];
    let condition = [
        "on reasonable request",
        "upon request",
        "on request",
        "upon reasonable request",
        "on formal request",
    ];
    format!(
        "{} {} {} {}.",
        pick(rng, &subject),
        pick(rng, &verb),
        pick(rng, &source),
        pick(rng, &condition)
    )
}

fn category2(rng: &mut ChaCha8Rng) -> String {
    let opener = [
        "The authors confirm that all data underlying the findings are fully available without restriction.",
        "The authors declare that all relevant data are reported in full.",
        "",
        "",
        "",
    ];
    let subject = [
        "All data",
        "All relevant data",
        "All datasets",
        "All supporting data",
        "All underlying data",
        "All data generated or analysed during this study",
        "The data used in this work",
    ];
    let location = [
        "are within the paper",
        "are within the paper and its Supporting Information files",
        "are included within the manuscript",
        "are included in this published article",
        "are contained within the article",
        "are included in the article and its additional files",
        "are provided in the supplementary materials",
        "are reported in the tables and figures of this article",
        "are available in the paper and its supplementary files",
    ];
    let opener = pick(rng, &opener);
    let body = format!("{} {}.", pick(rng, &subject), pick(rng, &location));
    if opener.is_empty() {
        body
    } else {
        format!("{opener} {body}")
    }
}

fn category3(rng: &mut ChaCha8Rng) -> String {
    let templates: Vec<String> = vec![
        format!(
            "The datasets generated during the current study are available in the {} repository, accession {}.",
            pick(rng, &["GenBank", "Dryad", "Zenodo", "Figshare", "ArrayExpress"]),
            accession(rng)
        ),
        format!(
            "All sequencing reads are deposited in the Sequence Read Archive under accession {}.",
            accession(rng)
        ),
        format!(
            "Microarray data are available in the ArrayExpress repository under accession E-MTAB-{}.",
            rng.gen_range(1_000..9_999)
        ),
        format!("Data are available at Dryad, doi:10.5061/dryad.{:05x}.", rng.gen_range(0x1000..0xfffff)),
        format!(
            "Code and data can be found at https://doi.org/10.5281/zenodo.{}.",
            rng.gen_range(1_000_000..9_999_999)
        ),
        format!(
            "Genome assemblies are deposited in GenBank under accession {}.",
            accession(rng)
        ),
        format!(
            "All data are available from the Figshare repository at https://doi.org/10.6084/m9.figshare.{}.",
            rng.gen_range(1_000_000..9_999_999)
        ),
        format!(
            "Raw reads are available in the European Nucleotide Archive under project {}.",
            accession(rng)
        ),
        format!(
            "The transcriptome data is deposited at NCBI/Gene Bank as the TSA accession {} and {}.",
            accession(rng),
            accession(rng)
        ),
    ];
    pick(rng, &templates).clone()
}

/// Curated high-frequency statements (the template texts publishers ship
/// in author guidance), paired with the four category exemplars.
fn curated_heads() -> Vec<LabeledExample> {
    let mk = |text: &str, category: u8, frequency: u32| LabeledExample {
        text: text.to_string(),
        category: Category::try_from(category).unwrap(),
        frequency,
    };
    vec![
        mk("No additional data available", 0, 9),
        mk("Not applicable", 0, 12),
        mk(
            "Supporting information is available in the additional files and further supporting data is available from the authors on request",
            1,
            10,
        ),
        mk(
            "The datasets used and/or analysed during the current study are available from the corresponding author on reasonable request.",
            1,
            25,
        ),
        mk("All relevant data are within the paper and its Supporting Information files", 2, 40),
        mk(
            "The authors confirm that all data underlying the findings are fully available without restriction. All data are included within the manuscript",
            2,
            10,
        ),
        mk(
            "The authors confirm that all data underlying the findings are fully available without restriction. The transcriptome data is deposited at NCBI/Gene Bank as the TSA accession SRR1151079 and SRR1151080",
            3,
            8,
        ),
        mk(
            "Code and data can be found at https://doi.org/10.5281/zenodo.3470062",
            3,
            8,
        ),
    ]
}

/// The 380-statement labeled corpus with class counts (20, 100, 225, 35),
/// templated from the category exemplars with paraphrase and noise
/// variation. Statements are unique; `frequency` marks how often each
/// statement occurs verbatim corpus-wide.
pub fn statement_corpus(seed: u64) -> Vec<LabeledExample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets: [(Category, usize); 4] = [
        (Category::NotAvailable, 20),
        (Category::OnRequest, 100),
        (Category::InPaper, 225),
        (Category::InRepository, 35),
    ];
    let mut out: Vec<LabeledExample> = Vec::with_capacity(380);
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for head in curated_heads() {
        seen.insert(head.text.clone());
        out.push(head);
    }
    for (category, target) in targets {
        let mut count = out.iter().filter(|e| e.category == category).count();
        let mut attempts = 0;
        while count < target {
            attempts += 1;
            let text = match category {
                Category::NotAvailable => category0(&mut rng),
                Category::OnRequest => category1(&mut rng),
                Category::InPaper => category2(&mut rng),
                Category::InRepository => category3(&mut rng),
            };
            let text = if attempts > 4000 {
                // template space nearly exhausted; salt with a study tag
                format!("{} (study {}).", text.trim_end_matches('.'), rng.gen_range(100..999))
            } else {
                text
            };
            if seen.insert(text.clone()) {
                out.push(LabeledExample {
                    text,
                    category,
                    frequency: if rng.gen_bool(0.1) { rng.gen_range(2..4) } else { 1 },
                });
                count += 1;
            }
        }
    }
    out.sort_by(|a, b| (a.category, &a.text).cmp(&(b.category, &b.text)));
    out
}

/// A random record set plus the generator's own adjacency bookkeeping:
/// (cited key, citing key) pairs for every resolvable, non-self,
/// deduplicated reference.
pub struct SynthRecords {
    pub records: Vec<ArticleRecord>,
    pub planted_edges: BTreeSet<(String, String)>,
}

pub fn random_records(seed: u64, n_articles: usize) -> SynthRecords {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = (n_articles / 3).max(3);
    let authors: Vec<AuthorName> = (0..pool)
        .map(|i| AuthorName {
            given_name: format!("Given{}", i % 17),
            surname: format!("Surname{i}"),
        })
        .collect();

    let mut ids = Vec::with_capacity(n_articles);
    for i in 0..n_articles {
        let mut id = ArticleId::default();
        match rng.gen_range(0..10) {
            0 => id.set(IdKind::Pmid, &format!("9{i:06}")),
            1..=3 => {
                id.set(IdKind::Doi, &format!("10.5555/synth.{seed}.{i}"));
                id.set(IdKind::Pmid, &format!("9{i:06}"));
            }
            _ => id.set(IdKind::Doi, &format!("10.5555/synth.{seed}.{i}")),
        }
        ids.push(id);
    }

    let mut records = Vec::with_capacity(n_articles);
    let mut planted_edges = BTreeSet::new();
    for i in 0..n_articles {
        let n_authors = rng.gen_range(1..=4);
        let mut article_authors = Vec::with_capacity(n_authors);
        for _ in 0..n_authors {
            article_authors.push(pick(&mut rng, &authors).clone());
        }
        article_authors.dedup();

        let mut references = Vec::new();
        let mut cited_targets: BTreeSet<usize> = BTreeSet::new();
        for _ in 0..rng.gen_range(0..=6) {
            let target = rng.gen_range(0..n_articles);
            // cite via a random one of the target's identifier kinds
            let target_id = &ids[target];
            let mut r = ArticleId::default();
            if target_id.doi.is_some() && (target_id.pmid.is_none() || rng.gen_bool(0.7)) {
                r.set_kind_for_tests(IdKind::Doi, target_id.doi.clone().unwrap());
            } else if let Some(pmid) = &target_id.pmid {
                r.set_kind_for_tests(IdKind::Pmid, pmid.clone());
            }
            references.push(r);
            if target != i {
                cited_targets.insert(target);
            }
        }
        // some unresolvable references
        for _ in 0..rng.gen_range(0..3) {
            let mut r = ArticleId::default();
            r.set(IdKind::Doi, &format!("10.9999/external.{}", rng.gen_range(0..100000)));
            references.push(r);
        }
        let n_identifierless = rng.gen_range(0..4);
        let n_references_total = (references.len() + n_identifierless).max(1);

        let record = ArticleRecord {
            id: ids[i].clone(),
            journal_title: "Synthetic Journal".into(),
            publisher: Publisher::Other,
            pub_year: rng.gen_range(2009..=2018),
            pub_month: if rng.gen_bool(0.15) { None } else { Some(rng.gen_range(1..=12)) },
            authors: article_authors,
            references,
            n_references_total,
            article_type: ArticleType::Research,
            das_candidates: vec![],
        };
        for target in cited_targets {
            planted_edges
                .insert((ids[target].canonical_key(), record.id.canonical_key()));
        }
        records.push(record);
    }
    SynthRecords { records, planted_edges }
}

impl ArticleId {
    /// Raw setter used by generators that already hold normalized values.
    fn set_kind_for_tests(&mut self, kind: IdKind, value: String) {
        match kind {
            IdKind::Doi => self.doi = Some(value),
            IdKind::Pmid => self.pmid = Some(value),
            IdKind::Pmcid => self.pmcid = Some(value),
            IdKind::PublisherId => self.publisher_id = Some(value),
        }
    }
}

// ---------------------------------------------------------------------
// JATS fixture corpus
// ---------------------------------------------------------------------

struct JournalPlan {
    title: &'static str,
    publisher: Publisher,
    n_articles: usize,
    /// category sampling weights (cat 0..3) for articles that get a DAS
    das_mix: [u32; 4],
    field: Option<(&'static str, &'static str, &'static str)>,
}

fn journal_plans() -> Vec<JournalPlan> {
    use Publisher::*;
    vec![
        JournalPlan {
            title: "PLOS ONE",
            publisher: Plos,
            n_articles: 55,
            das_mix: [1, 3, 12, 4],
            field: Some(("Health Sciences", "General Science & Technology", "General Science & Technology")),
        },
        JournalPlan {
            title: "PLOS Biology",
            publisher: Plos,
            n_articles: 15,
            das_mix: [1, 2, 8, 4],
            field: Some(("Natural Sciences", "Biology", "Developmental Biology")),
        },
        JournalPlan {
            title: "PLOS Computational Biology",
            publisher: Plos,
            n_articles: 10,
            das_mix: [1, 1, 6, 5],
            field: Some(("Natural Sciences", "Biology", "Bioinformatics")),
        },
        JournalPlan {
            title: "PLOS Medicine",
            publisher: Plos,
            n_articles: 10,
            das_mix: [1, 5, 7, 2],
            field: Some(("Health Sciences", "Clinical Medicine", "General & Internal Medicine")),
        },
        JournalPlan {
            title: "BMC Genomics",
            publisher: Bmc,
            n_articles: 25,
            das_mix: [1, 4, 4, 9],
            field: Some(("Health Sciences", "Biomedical Research", "Genetics & Heredity")),
        },
        JournalPlan {
            title: "Trials",
            publisher: Bmc,
            n_articles: 20,
            das_mix: [2, 12, 3, 1],
            field: Some(("Health Sciences", "Clinical Medicine", "Cardiovascular System")),
        },
        JournalPlan {
            title: "Parasites & Vectors",
            publisher: Bmc,
            n_articles: 15,
            das_mix: [1, 5, 5, 5],
            field: Some(("Health Sciences", "Biomedical Research", "Parasitology")),
        },
        JournalPlan {
            title: "BMC Bioinformatics",
            publisher: Bmc,
            n_articles: 15,
            das_mix: [1, 3, 5, 7],
            // deliberately absent from taxonomy.csv: exercises the
            // Unclassified fallback
            field: None,
        },
        JournalPlan {
            title: "BMC Public Health",
            publisher: Bmc,
            n_articles: 10,
            das_mix: [2, 8, 4, 1],
            field: Some(("Health Sciences", "Public Health & Health Services", "Public Health")),
        },
        JournalPlan {
            title: "Nature Communications",
            publisher: Other,
            n_articles: 15,
            das_mix: [0, 0, 0, 0],
            field: None,
        },
        JournalPlan {
            title: "Science Advances",
            publisher: Other,
            n_articles: 10,
            das_mix: [0, 0, 0, 0],
            field: None,
        },
    ]
}

struct ArticlePlan {
    doi: String,
    pmid: Option<String>,
    pmcid: Option<String>,
    journal: &'static str,
    publisher: Publisher,
    article_type: &'static str,
    year: i32,
    month: Option<u32>,
    authors: Vec<(String, String)>,
    internal_refs: Vec<usize>,
    external_refs: usize,
    bare_refs: usize,
    das: Option<(Category, String)>,
}

fn author_pool(rng: &mut ChaCha8Rng) -> Vec<(String, String)> {
    let given = [
        "Adaeze", "Maja", "Wei", "Priya", "Tomás", "Elif", "Kofi", "Hannah", "Ravi", "Yuki",
        "Lena", "Marco", "Amara", "Jonas", "Fatima", "Carlos",
    ];
    let surnames = [
        "Okafor", "Lindqvist", "Zhang", "Nair", "García", "Demir", "Mensah", "Keller", "Iyer",
        "Tanaka", "Novak", "Rossi", "Diallo", "Bergström", "Haddad", "Silva", "Petrov", "Owusu",
        "Fischer", "Moreau",
    ];
    let mut pool = Vec::new();
    for s in surnames {
        for g in given {
            pool.push((g.to_string(), s.to_string()));
        }
    }
    pool.shuffle(rng);
    pool.truncate(120);
    pool
}

fn sample_category(rng: &mut ChaCha8Rng, mix: &[u32; 4]) -> Category {
    let total: u32 = mix.iter().sum();
    let mut roll = rng.gen_range(0..total);
    for (i, &w) in mix.iter().enumerate() {
        if roll < w {
            return Category::try_from(i as u8).unwrap();
        }
        roll -= w;
    }
    Category::InPaper
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn emit_jats(plan: &ArticlePlan) -> String {
    let mut xml = String::with_capacity(4096);
    xml.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    xml.push_str(&format!(
        "<article article-type=\"{}\">\n  <front>\n    <journal-meta>\n      <journal-title-group><journal-title>{}</journal-title></journal-title-group>\n    </journal-meta>\n    <article-meta>\n",
        plan.article_type,
        xml_escape(plan.journal)
    ));
    xml.push_str(&format!(
        "      <article-id pub-id-type=\"doi\">{}</article-id>\n",
        xml_escape(&plan.doi)
    ));
    if let Some(pmid) = &plan.pmid {
        xml.push_str(&format!(
            "      <article-id pub-id-type=\"pmid\">{pmid}</article-id>\n"
        ));
    }
    if let Some(pmcid) = &plan.pmcid {
        xml.push_str(&format!(
            "      <article-id pub-id-type=\"pmc\">PMC{pmcid}</article-id>\n"
        ));
    }
    xml.push_str("      <contrib-group>\n");
    for (given, surname) in &plan.authors {
        xml.push_str(&format!(
            "        <contrib contrib-type=\"author\"><name><surname>{}</surname><given-names>{}</given-names></name></contrib>\n",
            xml_escape(surname),
            xml_escape(given)
        ));
    }
    xml.push_str("      </contrib-group>\n");
    xml.push_str(&format!("      <pub-date pub-type=\"epub\"><year>{}</year>", plan.year));
    if let Some(month) = plan.month {
        xml.push_str(&format!("<month>{month}</month>"));
    }
    xml.push_str("</pub-date>\n");
    if let (Some((_, text)), Publisher::Plos) = (&plan.das, plan.publisher) {
        xml.push_str(&format!(
            "      <custom-meta-group>\n        <custom-meta id=\"data-availability\">\n          <meta-name>Data Availability</meta-name>\n          <meta-value>{}</meta-value>\n        </custom-meta>\n      </custom-meta-group>\n",
            xml_escape(text)
        ));
    }
    xml.push_str("    </article-meta>\n  </front>\n  <body>\n    <sec><title>Introduction</title><p>Synthetic body text for testing.</p></sec>\n  </body>\n  <back>\n");
    if let (Some((_, text)), Publisher::Bmc) = (&plan.das, plan.publisher) {
        let title = if plan.year < 2016 {
            "Availability of supporting data"
        } else {
            "Availability of data and materials"
        };
        xml.push_str(&format!(
            "    <sec><title>{title}</title><p>{}</p></sec>\n",
            xml_escape(text)
        ));
    }
    xml.push_str("    <ref-list>\n");
    let mut ref_no = 0;
    for doi in plan.internal_refs.iter().map(|&t| format!("10.6000/fix.{t:03}")) {
        ref_no += 1;
        xml.push_str(&format!(
            "      <ref id=\"B{ref_no}\"><mixed-citation>Cited work {ref_no}.</mixed-citation><pub-id pub-id-type=\"doi\">{doi}</pub-id></ref>\n"
        ));
    }
    for i in 0..plan.external_refs {
        ref_no += 1;
        xml.push_str(&format!(
            "      <ref id=\"B{ref_no}\"><mixed-citation>External work {ref_no}.</mixed-citation><pub-id pub-id-type=\"doi\">10.7777/ext.{i}.{ref_no}</pub-id></ref>\n"
        ));
    }
    for _ in 0..plan.bare_refs {
        ref_no += 1;
        xml.push_str(&format!(
            "      <ref id=\"B{ref_no}\"><mixed-citation>Unidentified work {ref_no}.</mixed-citation></ref>\n"
        ));
    }
    xml.push_str("    </ref-list>\n  </back>\n</article>\n");
    xml
}

/// All files of the fixture corpus, keyed by path relative to the
/// fixture root.
pub struct FixtureSet {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl FixtureSet {
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        for (rel, bytes) in &self.files {
            let path = dir.join(rel);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Error::io(parent.display().to_string(), e))?;
            }
            std::fs::write(&path, bytes)
                .map_err(|e| Error::io(path.display().to_string(), e))?;
        }
        Ok(())
    }
}

fn gzip(bytes: &[u8]) -> Vec<u8> {
    let mut encoder =
        flate2::write::GzEncoder::new(Vec::new(), flate2::Compression::default());
    encoder.write_all(bytes).expect("gzip write");
    encoder.finish().expect("gzip finish")
}

/// The 200-record fixture corpus: 201 valid JATS files (one article is
/// duplicated under two files and merges on ingest), three reject
/// fixtures, two gzip-compressed members, and the companion csv/config
/// inputs.
pub fn fixture_corpus(seed: u64) -> FixtureSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = author_pool(&mut rng);
    let statements = statement_corpus(seed);
    let by_category: Vec<Vec<&LabeledExample>> = (0..4)
        .map(|c| {
            statements
                .iter()
                .filter(|e| e.category.as_u8() == c as u8)
                .collect()
        })
        .collect();

    // Weighted choice of a statement within a category: heads with high
    // corpus frequency are proportionally more likely.
    let choose_statement = {
        let by_category = by_category.clone();
        move |rng: &mut ChaCha8Rng, category: Category| -> String {
            let pool = &by_category[category.index()];
            let total: u32 = pool.iter().map(|e| e.frequency).sum();
            let mut roll = rng.gen_range(0..total);
            for e in pool {
                if roll < e.frequency {
                    return e.text.clone();
                }
                roll -= e.frequency;
            }
            pool[0].text.clone()
        }
    };

    let mut plans: Vec<ArticlePlan> = Vec::with_capacity(200);
    let mut article_no = 0usize;
    for journal in journal_plans() {
        for _ in 0..journal.n_articles {
            let i = article_no;
            article_no += 1;
            let year = *pick(&mut rng, &[
                2008, 2009, 2010, 2011, 2011, 2012, 2012, 2013, 2013, 2014, 2014, 2014, 2015,
                2015, 2015, 2016, 2016, 2017, 2017, 2018,
            ]);
            let month = if rng.gen_bool(0.12) { None } else { Some(rng.gen_range(1..=12)) };
            let article_type = match rng.gen_range(0..100) {
                0..=3 => "review-article",
                4..=5 => "editorial",
                _ => "research-article",
            };
            let n_authors = rng.gen_range(1..=8);
            let mut authors: Vec<(String, String)> = Vec::with_capacity(n_authors);
            // low indices are the "prolific" authors
            for _ in 0..n_authors {
                let idx = (rng.gen_range(0..pool.len()) * rng.gen_range(1..=3) / 3).min(pool.len() - 1);
                let a = pool[idx].clone();
                if !authors.contains(&a) {
                    authors.push(a);
                }
            }
            let das = {
                let policy_active = match journal.publisher {
                    Publisher::Plos => year > 2014 || (year == 2014 && month.unwrap_or(6) >= 3),
                    Publisher::Bmc => year >= 2011,
                    Publisher::Other => false,
                };
                let p = match journal.publisher {
                    Publisher::Plos if policy_active => 0.9,
                    Publisher::Plos => 0.2,
                    Publisher::Bmc if year >= 2015 => 0.85,
                    Publisher::Bmc if policy_active => 0.35,
                    _ => 0.0,
                };
                if article_type == "research-article" && rng.gen_bool(p) {
                    let category = sample_category(&mut rng, &journal.das_mix);
                    Some((category, choose_statement(&mut rng, category)))
                } else {
                    None
                }
            };
            plans.push(ArticlePlan {
                doi: format!("10.6000/fix.{i:03}"),
                pmid: if rng.gen_bool(0.8) { Some(format!("3{i:05}")) } else { None },
                pmcid: if rng.gen_bool(0.5) { Some(format!("8{i:05}")) } else { None },
                journal: journal.title,
                publisher: journal.publisher,
                article_type,
                year,
                month,
                authors,
                internal_refs: vec![],
                external_refs: rng.gen_range(1..=6),
                bare_refs: rng.gen_range(1..=8),
                das,
            });
        }
    }

    // Citations flow backward in time; popular articles attract more.
    let popularity: Vec<u32> = (0..plans.len()).map(|_| rng.gen_range(0..5)).collect();
    let dated: Vec<(i32, u32)> = plans
        .iter()
        .map(|p| (p.year, p.month.unwrap_or(6)))
        .collect();
    for i in 0..plans.len() {
        let mut candidates: Vec<usize> = (0..plans.len())
            .filter(|&j| j != i && dated[j] < dated[i])
            .collect();
        if candidates.is_empty() {
            continue;
        }
        let n_refs = rng.gen_range(0..=10).min(candidates.len());
        let mut chosen = BTreeSet::new();
        for _ in 0..n_refs * 2 {
            if chosen.len() >= n_refs {
                break;
            }
            let weights: Vec<u32> = candidates.iter().map(|&j| 1 + popularity[j]).collect();
            let total: u32 = weights.iter().sum();
            let mut roll = rng.gen_range(0..total);
            let mut picked = candidates[0];
            for (k, &j) in candidates.iter().enumerate() {
                if roll < weights[k] {
                    picked = j;
                    break;
                }
                roll -= weights[k];
            }
            chosen.insert(picked);
            candidates.retain(|&j| j != picked);
            if candidates.is_empty() {
                break;
            }
        }
        plans[i].internal_refs = chosen.into_iter().collect();
    }

    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    let gzip_members = [7usize, 141];
    for (i, plan) in plans.iter().enumerate() {
        let xml = emit_jats(plan);
        if gzip_members.contains(&i) {
            files.insert(format!("corpus/article_{i:03}.xml.gz"), gzip(xml.as_bytes()));
        } else {
            files.insert(format!("corpus/article_{i:03}.xml"), xml.into_bytes());
        }
    }

    // A duplicate of article 12 under a second file: same DOI, extra
    // PMCID. Ingest merges the pair, keeping the record count at 200.
    {
        let mut dup = emit_jats(&plans[12]);
        if plans[12].pmcid.is_none() {
            dup = dup.replace(
                "</article-id>\n      <contrib-group>",
                "</article-id>\n      <article-id pub-id-type=\"pmc\">PMC912345</article-id>\n      <contrib-group>",
            );
        }
        files.insert("corpus/article_012_mirror.xml".to_string(), dup.into_bytes());
    }

    // Filter-outcome fixtures.
    files.insert(
        "corpus/reject_missing_id.xml".to_string(),
        b"<article article-type=\"research-article\"><front><article-meta><pub-date pub-type=\"epub\"><year>2015</year></pub-date></article-meta></front><back><ref-list><ref><pub-id pub-id-type=\"pmid\">1</pub-id></ref></ref-list></back></article>"
            .to_vec(),
    );
    files.insert(
        "corpus/reject_missing_date.xml".to_string(),
        b"<article article-type=\"research-article\"><front><article-meta><article-id pub-id-type=\"doi\">10.6000/reject.date</article-id></article-meta></front><back><ref-list><ref><pub-id pub-id-type=\"pmid\">1</pub-id></ref></ref-list></back></article>"
            .to_vec(),
    );
    files.insert(
        "corpus/reject_no_refs.xml".to_string(),
        b"<article article-type=\"research-article\"><front><article-meta><article-id pub-id-type=\"doi\">10.6000/reject.refs</article-id><pub-date pub-type=\"epub\"><year>2015</year><month>2</month></pub-date></article-meta></front></article>"
            .to_vec(),
    );

    // Companion inputs.
    let mut journals_csv = String::from("journal_title,publisher,encouraged_from,required_from\n");
    for journal in journal_plans() {
        match journal.publisher {
            Publisher::Plos => {
                journals_csv.push_str(&format!("{},PLOS,,2014-03-01\n", journal.title))
            }
            Publisher::Bmc => journals_csv.push_str(&format!(
                "{},BMC,2011-07-01,2015-05-01\n",
                journal.title
            )),
            Publisher::Other => {}
        }
    }
    files.insert("journals.csv".to_string(), journals_csv.into_bytes());

    let mut taxonomy_csv = String::from("journal_title,domain,field,subfield\n");
    for journal in journal_plans() {
        if let Some((domain, field, subfield)) = journal.field {
            taxonomy_csv.push_str(&format!(
                "{},{domain},{field},{subfield}\n",
                journal.title
            ));
        }
    }
    files.insert("taxonomy.csv".to_string(), taxonomy_csv.into_bytes());

    let mut labels_csv = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut labels_csv);
        w.write_record(["text", "category", "frequency"]).expect("csv");
        for e in &statements {
            w.write_record([
                e.text.as_str(),
                &e.category.as_u8().to_string(),
                &e.frequency.to_string(),
            ])
            .expect("csv");
        }
        w.flush().expect("csv flush");
    }
    files.insert("labels.csv".to_string(), labels_csv);

    files.insert(
        "rules.toml".to_string(),
        crate::das::ExtractionRules::default().to_toml().into_bytes(),
    );
    files.insert(
        "stopwords.txt".to_string(),
        crate::text::DEFAULT_STOPWORDS.as_bytes().to_vec(),
    );

    FixtureSet { files }
}
