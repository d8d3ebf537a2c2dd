//! Streaming JATS parser built on quick-xml.
//!
//! Captures front-matter identifiers, journal title, publication date,
//! authors and the article type; counts references and resolves the ones
//! carrying identifiers; harvests DAS candidates (sections and
//! custom-meta elements whose titles match an extraction rule pattern).

use super::{
    ArticleId, ArticleRecord, ArticleType, AuthorName, IdKind, ParseOutcome, ParseRejection,
    Publisher, RejectionReason,
};
use crate::das::{normalize_whitespace, DasCandidate, ExtractionRules, MatchKind};
use crate::{Error, Result};
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

#[derive(Default)]
struct PubDate {
    kind: String,
    year: Option<i32>,
    month: Option<u32>,
}

/// An open <sec> or <notes> element. Paragraph text accumulates into the
/// frame and all of its ancestors, so a matched section includes its
/// nested subsections.
struct SectionFrame {
    title: Option<String>,
    text: Vec<String>,
    depth: usize,
}

struct ParseState {
    id: ArticleId,
    journal_title: String,
    article_type: ArticleType,
    pub_dates: Vec<PubDate>,
    authors: Vec<AuthorName>,
    references: Vec<ArticleId>,
    n_references_total: usize,
    candidates: Vec<DasCandidate>,

    stack: Vec<String>,
    sections: Vec<SectionFrame>,
    current_pub_date: Option<PubDate>,
    current_author: Option<(String, String)>,
    current_ref: Option<ArticleId>,
    meta_name: Option<String>,
    meta_value: Option<String>,
    text_target: TextTarget,
    text_buf: String,
}

#[derive(PartialEq, Clone, Copy)]
enum TextTarget {
    None,
    JournalTitle,
    ArticleId(IdKind),
    DateYear,
    DateMonth,
    Surname,
    GivenNames,
    RefPubId(IdKind),
    SectionTitle,
    Paragraph,
    MetaName,
    MetaValue,
}

fn local_name(qname: &[u8]) -> String {
    let name = match qname.iter().position(|&b| b == b':') {
        Some(i) => &qname[i + 1..],
        None => qname,
    };
    String::from_utf8_lossy(name).to_lowercase()
}

fn attr_value(tag: &BytesStart<'_>, name: &str) -> Option<String> {
    tag.attributes().flatten().find_map(|a| {
        if local_name(a.key.as_ref()) == name {
            Some(String::from_utf8_lossy(&a.value).to_string())
        } else {
            None
        }
    })
}

fn id_kind_from_attr(v: &str) -> Option<IdKind> {
    match v.trim().to_lowercase().as_str() {
        "doi" => Some(IdKind::Doi),
        "pmid" | "pubmed" => Some(IdKind::Pmid),
        "pmc" | "pmcid" => Some(IdKind::Pmcid),
        "publisher-id" | "pii" => Some(IdKind::PublisherId),
        _ => None,
    }
}

impl ParseState {
    fn new() -> Self {
        ParseState {
            id: ArticleId::default(),
            journal_title: String::new(),
            article_type: ArticleType::Other,
            pub_dates: Vec::new(),
            authors: Vec::new(),
            references: Vec::new(),
            n_references_total: 0,
            candidates: Vec::new(),
            stack: Vec::new(),
            sections: Vec::new(),
            current_pub_date: None,
            current_author: None,
            current_ref: None,
            meta_name: None,
            meta_value: None,
            text_target: TextTarget::None,
            text_buf: String::new(),
        }
    }

    fn in_element(&self, name: &str) -> bool {
        self.stack.iter().any(|e| e == name)
    }

    fn on_start(&mut self, tag: &BytesStart<'_>) {
        let name = local_name(tag.name().as_ref());
        match name.as_str() {
            "article" if self.stack.is_empty() => {
                if let Some(t) = attr_value(tag, "article-type") {
                    self.article_type = ArticleType::from_jats(&t);
                }
            }
            "journal-title" if self.in_element("journal-meta") && self.journal_title.is_empty() => {
                self.begin_text(TextTarget::JournalTitle);
            }
            "article-id" if self.in_element("article-meta") && !self.in_element("ref") => {
                if let Some(kind) = attr_value(tag, "pub-id-type").and_then(|v| id_kind_from_attr(&v))
                {
                    self.begin_text(TextTarget::ArticleId(kind));
                }
            }
            "pub-date" if self.in_element("article-meta") => {
                let kind = attr_value(tag, "pub-type")
                    .or_else(|| attr_value(tag, "date-type"))
                    .unwrap_or_default();
                self.current_pub_date = Some(PubDate { kind, ..Default::default() });
            }
            "year" if self.current_pub_date.is_some() => self.begin_text(TextTarget::DateYear),
            "month" if self.current_pub_date.is_some() => self.begin_text(TextTarget::DateMonth),
            "contrib" if self.in_element("contrib-group") => {
                let contrib_type = attr_value(tag, "contrib-type").unwrap_or_else(|| "author".into());
                if contrib_type == "author" {
                    self.current_author = Some((String::new(), String::new()));
                }
            }
            "surname" if self.current_author.is_some() => self.begin_text(TextTarget::Surname),
            "given-names" if self.current_author.is_some() => {
                self.begin_text(TextTarget::GivenNames)
            }
            "ref" if self.in_element("ref-list") => {
                self.n_references_total += 1;
                self.current_ref = Some(ArticleId::default());
            }
            "pub-id" if self.current_ref.is_some() => {
                if let Some(kind) = attr_value(tag, "pub-id-type").and_then(|v| id_kind_from_attr(&v))
                {
                    self.begin_text(TextTarget::RefPubId(kind));
                }
            }
            "sec" | "notes" => {
                self.sections.push(SectionFrame {
                    title: None,
                    text: Vec::new(),
                    depth: self.stack.len(),
                });
            }
            "title" => {
                // The first title directly under the innermost open section.
                if let Some(frame) = self.sections.last() {
                    if frame.title.is_none() && self.stack.len() == frame.depth + 1 {
                        self.begin_text(TextTarget::SectionTitle);
                    }
                }
            }
            "p" if !self.sections.is_empty() || self.meta_value.is_some() => {
                self.begin_text(TextTarget::Paragraph);
            }
            "custom-meta" => {
                self.meta_name = Some(String::new());
                self.meta_value = None;
            }
            "meta-name" if self.meta_name.is_some() => self.begin_text(TextTarget::MetaName),
            "meta-value" if self.meta_name.is_some() => {
                self.meta_value = Some(String::new());
                self.begin_text(TextTarget::MetaValue);
            }
            _ => {}
        }
        self.stack.push(name);
    }

    fn begin_text(&mut self, target: TextTarget) {
        self.text_target = target;
        self.text_buf.clear();
    }

    fn on_text(&mut self, text: &str) {
        if self.text_target != TextTarget::None {
            self.text_buf.push_str(text);
        }
    }

    fn on_end(&mut self, qname: &[u8], rules: &ExtractionRules) {
        let name = local_name(qname);
        self.stack.pop();
        let text = normalize_whitespace(&std::mem::take(&mut self.text_buf));
        let target = std::mem::replace(&mut self.text_target, TextTarget::None);
        match target {
            TextTarget::JournalTitle => self.journal_title = text,
            TextTarget::ArticleId(kind) => self.id.set(kind, &text),
            TextTarget::DateYear => {
                if let Some(d) = &mut self.current_pub_date {
                    d.year = text.parse().ok();
                }
            }
            TextTarget::DateMonth => {
                if let Some(d) = &mut self.current_pub_date {
                    d.month = text.parse().ok().filter(|m| (1..=12).contains(m));
                }
            }
            TextTarget::Surname => {
                if let Some((_, surname)) = &mut self.current_author {
                    *surname = text;
                }
            }
            TextTarget::GivenNames => {
                if let Some((given, _)) = &mut self.current_author {
                    *given = text;
                }
            }
            TextTarget::RefPubId(kind) => {
                if let Some(r) = &mut self.current_ref {
                    r.set(kind, &text);
                }
            }
            TextTarget::SectionTitle => {
                if let Some(frame) = self.sections.last_mut() {
                    frame.title = Some(text);
                }
            }
            TextTarget::Paragraph => {
                if let Some(v) = &mut self.meta_value {
                    if !text.is_empty() {
                        if !v.is_empty() {
                            v.push(' ');
                        }
                        v.push_str(&text);
                    }
                } else if !text.is_empty() {
                    for frame in &mut self.sections {
                        frame.text.push(text.clone());
                    }
                }
            }
            TextTarget::MetaName => {
                if let Some(n) = &mut self.meta_name {
                    *n = text;
                }
            }
            TextTarget::MetaValue => {
                if let Some(v) = &mut self.meta_value {
                    if v.is_empty() {
                        *v = text;
                    } else if !text.is_empty() {
                        v.push(' ');
                        v.push_str(&text);
                    }
                }
            }
            TextTarget::None => {}
        }

        match name.as_str() {
            "pub-date" => {
                if let Some(d) = self.current_pub_date.take() {
                    self.pub_dates.push(d);
                }
            }
            "contrib" => {
                if let Some((given, surname)) = self.current_author.take() {
                    if !given.is_empty() || !surname.is_empty() {
                        self.authors.push(AuthorName { given_name: given, surname });
                    }
                }
            }
            "ref" => {
                if let Some(r) = self.current_ref.take() {
                    if !r.is_empty() {
                        self.references.push(r);
                    }
                }
            }
            "sec" | "notes" => {
                if let Some(frame) = self.sections.pop() {
                    if let Some(title) = frame.title {
                        if rules.any_pattern_matches(MatchKind::SectionTitle, &title) {
                            self.candidates.push(DasCandidate {
                                kind: MatchKind::SectionTitle,
                                title,
                                text: frame.text.join(" "),
                            });
                        }
                    }
                }
            }
            "custom-meta" => {
                let meta_name = self.meta_name.take().unwrap_or_default();
                let meta_value = self.meta_value.take().unwrap_or_default();
                if !meta_name.is_empty()
                    && !meta_value.is_empty()
                    && rules.any_pattern_matches(MatchKind::MetaElement, &meta_name)
                {
                    self.candidates.push(DasCandidate {
                        kind: MatchKind::MetaElement,
                        title: meta_name,
                        text: meta_value,
                    });
                }
            }
            _ => {}
        }
    }

    /// Publication date preference: electronic, then print, then the
    /// first date carrying a year.
    fn chosen_date(&self) -> Option<(i32, Option<u32>)> {
        let by_kind = |kind: &str| {
            self.pub_dates.iter().find(|d| d.kind == kind && d.year.is_some())
        };
        let chosen = by_kind("epub")
            .or_else(|| by_kind("ppub"))
            .or_else(|| self.pub_dates.iter().find(|d| d.year.is_some()))?;
        Some((chosen.year.unwrap(), chosen.month))
    }

    fn finish(self) -> ParseOutcome {
        let date = self.chosen_date();
        if self.id.is_empty() {
            return ParseOutcome::Rejected(ParseRejection { reason: RejectionReason::MissingId });
        }
        let Some((pub_year, pub_month)) = date else {
            return ParseOutcome::Rejected(ParseRejection { reason: RejectionReason::MissingDate });
        };
        if pub_year < 1900 {
            return ParseOutcome::Rejected(ParseRejection { reason: RejectionReason::MissingDate });
        }
        if self.n_references_total == 0 {
            return ParseOutcome::Rejected(ParseRejection {
                reason: RejectionReason::NoReferences,
            });
        }
        ParseOutcome::Retained(Box::new(ArticleRecord {
            id: self.id,
            journal_title: self.journal_title,
            publisher: Publisher::Other,
            pub_year,
            pub_month,
            authors: self.authors,
            references: self.references,
            n_references_total: self.n_references_total,
            article_type: self.article_type,
            das_candidates: self.candidates,
        }))
    }
}

pub fn parse(xml: &[u8], rules: &ExtractionRules) -> Result<ParseOutcome> {
    let text = std::str::from_utf8(xml)
        .map_err(|e| Error::MalformedXml(format!("not valid UTF-8: {e}")))?;
    let mut reader = Reader::from_str(text);
    reader.config_mut().trim_text(false);
    let mut state = ParseState::new();
    loop {
        match reader.read_event() {
            Ok(Event::Start(tag)) => state.on_start(&tag),
            Ok(Event::Empty(tag)) => {
                state.on_start(&tag);
                state.on_end(tag.name().as_ref(), rules);
            }
            Ok(Event::Text(t)) => {
                let decoded = t.unescape().map_err(|e| Error::MalformedXml(e.to_string()))?;
                state.on_text(&decoded);
            }
            Ok(Event::CData(c)) => {
                state.on_text(&String::from_utf8_lossy(c.as_ref()));
            }
            Ok(Event::End(tag)) => state.on_end(tag.name().as_ref(), rules),
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(Error::MalformedXml(e.to_string())),
        }
    }
    Ok(state.finish())
}
