//! The curated journal list with publisher assignment and DAS policy
//! dates.
//!
//! File format (`journals.csv`): header row required, columns
//! `journal_title,publisher,encouraged_from,required_from`; the date
//! columns hold ISO-8601 dates or are empty.

use super::Publisher;
use crate::dates::YearMonth;
use crate::{Error, Result};
use serde::Deserialize;
use std::collections::HashMap;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct JournalPolicy {
    pub publisher: Publisher,
    pub encouraged_from: Option<YearMonth>,
    pub required_from: Option<YearMonth>,
}

#[derive(Debug, Clone, Default)]
pub struct JournalPolicyTable {
    by_title: HashMap<String, JournalPolicy>,
}

fn norm_title(title: &str) -> String {
    title.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

#[derive(Deserialize)]
struct Row {
    journal_title: String,
    publisher: String,
    #[serde(default)]
    encouraged_from: String,
    #[serde(default)]
    required_from: String,
}

impl JournalPolicyTable {
    pub fn load_csv(path: &Path) -> Result<Self> {
        let display = path.display().to_string();
        let mut reader = csv::Reader::from_path(path)
            .map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
        let mut table = JournalPolicyTable::default();
        for (line, row) in reader.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::bad_input(display.clone(), e.to_string()))?;
            let publisher = match row.publisher.trim().to_lowercase().as_str() {
                "plos" => Publisher::Plos,
                "bmc" => Publisher::Bmc,
                other => {
                    return Err(Error::bad_input(
                        display,
                        format!("row {}: unknown publisher {other:?}", line + 2),
                    ))
                }
            };
            let parse_date = |field: &str, name: &str| -> Result<Option<YearMonth>> {
                let field = field.trim();
                if field.is_empty() {
                    return Ok(None);
                }
                match YearMonth::parse_iso(field) {
                    Some(d) => Ok(Some(d)),
                    None => Err(Error::bad_input(
                        display.clone(),
                        format!("row {}: bad {name} date {field:?}", line + 2),
                    )),
                }
            };
            let encouraged_from = parse_date(&row.encouraged_from, "encouraged_from")?;
            let required_from = parse_date(&row.required_from, "required_from")?;
            if let (Some(e), Some(r)) = (encouraged_from, required_from) {
                if e > r {
                    return Err(Error::bad_input(
                        display,
                        format!(
                            "row {}: encouraged_from {e} is after required_from {r}",
                            line + 2
                        ),
                    ));
                }
            }
            table.by_title.insert(
                norm_title(&row.journal_title),
                JournalPolicy { publisher, encouraged_from, required_from },
            );
        }
        Ok(table)
    }

    pub fn get(&self, journal_title: &str) -> Option<&JournalPolicy> {
        self.by_title.get(&norm_title(journal_title))
    }

    pub fn publisher_of(&self, journal_title: &str) -> Option<Publisher> {
        self.get(journal_title).map(|p| p.publisher)
    }

    pub fn insert(&mut self, journal_title: &str, policy: JournalPolicy) {
        self.by_title.insert(norm_title(journal_title), policy);
    }

    pub fn len(&self) -> usize {
        self.by_title.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_title.is_empty()
    }

    /// Small fixed table used across unit tests.
    pub fn for_tests() -> Self {
        let mut t = JournalPolicyTable::default();
        t.insert(
            "PLOS ONE",
            JournalPolicy {
                publisher: Publisher::Plos,
                encouraged_from: None,
                required_from: Some(YearMonth::new(2014, 3)),
            },
        );
        t.insert(
            "Trials",
            JournalPolicy {
                publisher: Publisher::Bmc,
                encouraged_from: Some(YearMonth::new(2011, 7)),
                required_from: Some(YearMonth::new(2015, 5)),
            },
        );
        t.insert(
            "BMC Genomics",
            JournalPolicy {
                publisher: Publisher::Bmc,
                encouraged_from: Some(YearMonth::new(2011, 7)),
                required_from: Some(YearMonth::new(2015, 5)),
            },
        );
        t
    }
}
