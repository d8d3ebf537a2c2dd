//! Corpus mining for data availability statements (DAS) in open-access
//! scholarly articles.
//!
//! The crate covers the full pipeline: parsing JATS XML into article
//! records, extracting DAS from PLOS/BMC articles, classifying statements
//! into four availability categories, building a within-collection
//! citation/author graph with time-resolved H-indexes, and fitting the
//! citation-prediction regression on the assembled analysis table.
//!
//! The `dasmine` CLI (separate crate) wires these stages together around
//! an on-disk store; everything here is usable as a library:
//!
//! ```
//! use dasmine::classify::{train_svm, LabeledExample, SvmParams};
//! use dasmine::das::Category;
//! use dasmine::text::{PrepConfig, StopwordList};
//!
//! let examples: Vec<LabeledExample> = [
//!     ("No additional data available", 0),
//!     ("Data sharing is not applicable to this article", 0),
//!     ("The datasets are available from the corresponding author on request", 1),
//!     ("Data may be requested from the authors", 1),
//!     ("All relevant data are within the paper and its files", 2),
//!     ("All data are included within the manuscript", 2),
//!     ("The reads are deposited in the repository under accession SRR1151079", 3),
//!     ("Data are available at the Dryad repository, doi:10.5061/dryad.b1234", 3),
//! ]
//! .iter()
//! .map(|(text, category)| LabeledExample {
//!     text: text.to_string(),
//!     category: Category::try_from(*category).unwrap(),
//!     frequency: 1,
//! })
//! .collect();
//!
//! let model = train_svm(
//!     &examples,
//!     PrepConfig::new(false, true),
//!     &StopwordList::default(),
//!     SvmParams::default(),
//! )
//! .unwrap();
//! let category = model.predict("The sequence data are deposited in the repository");
//! assert_eq!(category, Category::try_from(3).unwrap());
//! ```

pub mod classify;
pub mod das;
pub mod dates;
pub mod error;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod regress;
pub mod store;
pub mod synth;
pub mod table;
pub mod text;

pub use error::{Error, Result};
