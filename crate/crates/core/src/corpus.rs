//! Chapter metadata ingestion and grouping into recommendable products.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Deserializer, Serialize};

use crate::text::normalize_person;

/// Length of the conference-series window, in calendar years, ending at the
/// reference year.
pub const CONFERENCE_WINDOW_YEARS: i32 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("input is not line-delimited JSON records")]
    NotRecordDelimited,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParentKind {
    Book,
    Journal,
    Proceedings,
}

fn null_default<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: Default + Deserialize<'de>,
{
    Ok(Option::<T>::deserialize(d)?.unwrap_or_default())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChapterRecord {
    pub chapter_id: String,
    pub title: String,
    #[serde(default, deserialize_with = "null_default")]
    pub r#abstract: String,
    #[serde(default, deserialize_with = "null_default")]
    pub keywords: Vec<String>,
    pub year: i32,
    #[serde(default, deserialize_with = "null_default")]
    pub authors: Vec<String>,
    pub parent_doi: String,
    pub parent_kind: ParentKind,
    #[serde(default, deserialize_with = "null_default")]
    pub parent_title: String,
    #[serde(default, deserialize_with = "null_default")]
    pub editors: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conference_series_id: Option<String>,
    /// Display name of the series, used by conference search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conference_series_name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conference_acronym: Option<String>,
}

impl ChapterRecord {
    pub fn validate(&self) -> Result<(), String> {
        if self.chapter_id.trim().is_empty() {
            return Err("empty chapter_id".into());
        }
        if self.title.trim().is_empty() {
            return Err("empty title".into());
        }
        if !(1900..=2100).contains(&self.year) {
            return Err(format!("year {} outside [1900, 2100]", self.year));
        }
        if self.parent_doi.trim().is_empty() {
            return Err("empty parent_doi".into());
        }
        if self.parent_kind == ParentKind::Proceedings && self.series_id().is_none() {
            return Err("missing series id".into());
        }
        Ok(())
    }

    fn series_id(&self) -> Option<&str> {
        self.conference_series_id.as_deref().filter(|s| !s.trim().is_empty())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub records: Vec<ChapterRecord>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Read chapter records, one JSON object per line. Bad records are skipped
/// and reported; only a stream that is not line-delimited JSON at all fails.
pub fn ingest_metadata<R: BufRead>(source: R) -> Result<IngestReport, CorpusError> {
    let mut report = IngestReport::default();
    let mut seen_ids = HashSet::new();
    let mut any_content = false;
    let mut any_object = false;

    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        any_content = true;
        if trimmed.starts_with('{') {
            any_object = true;
        }
        let record: ChapterRecord = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                report.diagnostics.push(Diagnostic { line: line_no, message: e.to_string() });
                continue;
            }
        };
        if let Err(message) = record.validate() {
            report.diagnostics.push(Diagnostic { line: line_no, message });
            continue;
        }
        if !seen_ids.insert(record.chapter_id.clone()) {
            report.diagnostics.push(Diagnostic {
                line: line_no,
                message: format!("duplicate chapter_id `{}`", record.chapter_id),
            });
            continue;
        }
        report.records.push(record);
    }

    if any_content && !any_object {
        return Err(CorpusError::NotRecordDelimited);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Book,
    JournalYear,
    ConferenceSeries,
}

impl ProductKind {
    pub const ALL: [ProductKind; 3] = [ProductKind::Book, ProductKind::JournalYear, ProductKind::ConferenceSeries];

    pub fn as_str(self) -> &'static str {
        match self {
            ProductKind::Book => "book",
            ProductKind::JournalYear => "journal_year",
            ProductKind::ConferenceSeries => "conference_series",
        }
    }

    fn id_prefix(self) -> &'static str {
        match self {
            ProductKind::Book => "book:",
            ProductKind::JournalYear => "journal:",
            ProductKind::ConferenceSeries => "conf:",
        }
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ProductKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "book" => Ok(ProductKind::Book),
            "journal_year" | "journal" => Ok(ProductKind::JournalYear),
            "conference_series" | "conference" => Ok(ProductKind::ConferenceSeries),
            other => Err(format!("unknown product kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDescriptor {
    pub product_id: String,
    pub kind: ProductKind,
    pub display_title: String,
    pub year_range: (i32, i32),
    /// Sorted by chapter_id.
    pub chapters: Vec<ChapterRecord>,
    pub authors: Vec<String>,
    pub editors: Vec<String>,
    /// DOI used for the external link. For a conference series this is the
    /// most recent volume in the window.
    pub doi: String,
    pub acronym: Option<String>,
}

/// Group chapters into books (by parent DOI, covering proceedings volumes
/// too), journal-years (by DOI and year), and conference series (by series
/// id, restricted to `[reference_year - 4, reference_year]`). Output is sorted
/// by product_id.
pub fn group_products(chapters: &[ChapterRecord], reference_year: i32) -> Vec<ProductDescriptor> {
    let window = (reference_year - (CONFERENCE_WINDOW_YEARS - 1))..=reference_year;
    let mut groups: BTreeMap<(ProductKind, String), Vec<&ChapterRecord>> = BTreeMap::new();

    for ch in chapters {
        let primary = match ch.parent_kind {
            ParentKind::Journal => (ProductKind::JournalYear, format!("{}@{}", ch.parent_doi, ch.year)),
            ParentKind::Book | ParentKind::Proceedings => (ProductKind::Book, ch.parent_doi.clone()),
        };
        groups.entry(primary).or_default().push(ch);
        if ch.parent_kind == ParentKind::Proceedings && window.contains(&ch.year) {
            if let Some(series) = ch.series_id() {
                groups.entry((ProductKind::ConferenceSeries, series.to_owned())).or_default().push(ch);
            }
        }
    }

    let mut products: Vec<ProductDescriptor> =
        groups.into_iter().map(|((kind, key), members)| build_product(kind, &key, members)).collect();
    products.sort_by(|a, b| a.product_id.cmp(&b.product_id));
    products
}

fn build_product(kind: ProductKind, key: &str, mut members: Vec<&ChapterRecord>) -> ProductDescriptor {
    members.sort_by(|a, b| a.chapter_id.cmp(&b.chapter_id));
    let min_year = members.iter().map(|c| c.year).min().expect("non-empty group");
    let max_year = members.iter().map(|c| c.year).max().expect("non-empty group");

    // Most recent volume first, ties by DOI.
    let latest = members
        .iter()
        .max_by(|a, b| a.year.cmp(&b.year).then_with(|| b.parent_doi.cmp(&a.parent_doi)))
        .expect("non-empty group");

    let first_some = |f: fn(&ChapterRecord) -> Option<&str>| {
        let mut by_recency = members.clone();
        by_recency.sort_by(|a, b| b.year.cmp(&a.year).then_with(|| a.chapter_id.cmp(&b.chapter_id)));
        by_recency.into_iter().find_map(|c| f(c).filter(|s| !s.trim().is_empty()).map(str::to_owned))
    };

    let (display_title, acronym) = match kind {
        ProductKind::Book => (members[0].parent_title.clone(), None),
        ProductKind::JournalYear => (format!("{} ({})", members[0].parent_title, members[0].year), None),
        ProductKind::ConferenceSeries => {
            let name = first_some(|c| c.conference_series_name.as_deref()).unwrap_or_else(|| latest.parent_title.clone());
            (name, first_some(|c| c.conference_acronym.as_deref()))
        }
    };

    ProductDescriptor {
        product_id: format!("{}{}", kind.id_prefix(), key),
        kind,
        display_title,
        year_range: (min_year, max_year),
        authors: dedup_people(members.iter().flat_map(|c| c.authors.iter())),
        editors: dedup_people(members.iter().flat_map(|c| c.editors.iter())),
        doi: latest.parent_doi.clone(),
        acronym,
        chapters: members.into_iter().cloned().collect(),
    }
}

fn dedup_people<'a>(names: impl Iterator<Item = &'a String>) -> Vec<String> {
    let mut seen = HashSet::new();
    names
        .filter(|n| !n.trim().is_empty())
        .filter(|n| seen.insert(normalize_person(n)))
        .map(|n| n.trim().to_owned())
        .collect()
}

/// Normalized person name -> ids of products they authored or edited.
pub fn person_index(products: &[ProductDescriptor]) -> BTreeMap<String, BTreeSet<String>> {
    let mut index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for p in products {
        for name in p.authors.iter().chain(&p.editors) {
            index.entry(normalize_person(name)).or_default().insert(p.product_id.clone());
        }
    }
    index
}
