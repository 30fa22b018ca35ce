//! Precomputed catalog: product summaries, topic labels, similarity scores,
//! and editor feedback.
//!
//! On disk a catalog is one text file plus a feedback side file:
//!
//! ```text
//! {"format":"sbr-catalog","schema_version":1}
//! {"products":{...},"topics":{...}}
//! #scores
//! conf:iswc<TAB>book:10.1007/978-3-540-92913-0<TAB>0.8731236152215465
//! ...
//! ```
//!
//! Scores are written in shortest round-trip form so a reload is bit-exact.
//! Feedback lives next to the catalog in `<catalog>.feedback.jsonl`, one
//! JSON object per line, and is only ever appended to while serving.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::annotator::{PmcDistribution, ReducedTopicList};
use crate::corpus::ProductKind;
use crate::ontology::TopicId;
use crate::simeng::SimilarityRecord;
use crate::text::normalize_person;

pub const SCHEMA_VERSION: u32 = 1;
const FORMAT_NAME: &str = "sbr-catalog";
const SCORES_MARKER: &str = "#scores";

/// Default number of results per query.
pub const DEFAULT_LIMIT: usize = 20;
/// Default publication-year window, in years, ending at the current year.
pub const DEFAULT_YEAR_SPAN: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("unsupported catalog schema version {found} (expected {SCHEMA_VERSION})")]
    Version { found: u64 },
    #[error("catalog line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("catalog integrity: {0}")]
    Integrity(String),
    #[error("unknown conference `{0}`")]
    UnknownConference(String),
    #[error("unknown product `{0}`")]
    UnknownProduct(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSummary {
    pub product_id: String,
    pub kind: ProductKind,
    pub title: String,
    pub year_range: (i32, i32),
    pub doi: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acronym: Option<String>,
    pub authors: Vec<String>,
    pub editors: Vec<String>,
    pub chapter_count: u32,
    pub reduced: ReducedTopicList,
    /// Full closed distribution.
    pub weights: BTreeMap<TopicId, u32>,
    pub pmc: PmcDistribution,
}

impl ProductSummary {
    pub fn overlaps_years(&self, from: i32, to: i32) -> bool {
        self.year_range.0 <= to && self.year_range.1 >= from
    }

    pub fn has_person(&self, needle: &str) -> bool {
        let needle = normalize_person(needle);
        self.authors.iter().chain(&self.editors).any(|p| normalize_person(p).contains(&needle))
    }

    pub fn link(&self) -> String {
        format!("https://doi.org/{}", self.doi)
    }
}

/// Display label and direct canonical parents of a topic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicInfo {
    pub label: String,
    pub broader: Vec<TopicId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Positive,
    Negative,
}

impl std::str::FromStr for Verdict {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "positive" => Ok(Verdict::Positive),
            "negative" => Ok(Verdict::Negative),
            other => Err(format!("unknown verdict `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackRecord {
    pub conference_id: String,
    pub product_id: String,
    pub verdict: Verdict,
    /// UTC seconds since the epoch.
    pub timestamp: i64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
struct CatalogMeta {
    products: BTreeMap<String, ProductSummary>,
    topics: BTreeMap<TopicId, TopicInfo>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Catalog {
    pub products: BTreeMap<String, ProductSummary>,
    pub topics: BTreeMap<TopicId, TopicInfo>,
    /// Conference id -> records, score descending then product id.
    pub scores: BTreeMap<String, Vec<SimilarityRecord>>,
    pub feedback: Vec<FeedbackRecord>,
}

fn score_order(a: &SimilarityRecord, b: &SimilarityRecord) -> std::cmp::Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.product_id.cmp(&b.product_id))
}

impl Catalog {
    /// Assemble a catalog, grouping and ordering score records. Every
    /// conference product gets a (possibly empty) score list.
    pub fn new(
        products: BTreeMap<String, ProductSummary>,
        topics: BTreeMap<TopicId, TopicInfo>,
        records: Vec<SimilarityRecord>,
    ) -> Result<Self, StoreError> {
        let mut scores: BTreeMap<String, Vec<SimilarityRecord>> = products
            .values()
            .filter(|p| p.kind == ProductKind::ConferenceSeries)
            .map(|p| (p.product_id.clone(), Vec::new()))
            .collect();
        for r in records {
            scores.entry(r.conference_id.clone()).or_default().push(r);
        }
        for list in scores.values_mut() {
            list.sort_by(score_order);
        }
        let catalog = Catalog { products, topics, scores, feedback: Vec::new() };
        catalog.validate()?;
        Ok(catalog)
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        for (id, p) in &self.products {
            if id != &p.product_id {
                return Err(StoreError::Integrity(format!("product key `{id}` != id `{}`", p.product_id)));
            }
        }
        for (conf, list) in &self.scores {
            match self.products.get(conf) {
                Some(p) if p.kind == ProductKind::ConferenceSeries => {}
                _ => return Err(StoreError::Integrity(format!("scores for unknown conference `{conf}`"))),
            }
            for r in list {
                if &r.conference_id != conf {
                    return Err(StoreError::Integrity(format!("record for `{}` filed under `{conf}`", r.conference_id)));
                }
                if !self.products.contains_key(&r.product_id) {
                    return Err(StoreError::Integrity(format!("score references unknown product `{}`", r.product_id)));
                }
            }
            if list.windows(2).any(|w| score_order(&w[0], &w[1]).is_gt()) {
                return Err(StoreError::Integrity(format!("scores for `{conf}` are not sorted")));
            }
        }
        Ok(())
    }

    pub fn conferences(&self) -> impl Iterator<Item = &ProductSummary> {
        self.products.values().filter(|p| p.kind == ProductKind::ConferenceSeries)
    }

    pub fn conference(&self, id: &str) -> Result<&ProductSummary, StoreError> {
        self.products
            .get(id)
            .filter(|p| p.kind == ProductKind::ConferenceSeries)
            .ok_or_else(|| StoreError::UnknownConference(id.to_owned()))
    }

    pub fn product(&self, id: &str) -> Result<&ProductSummary, StoreError> {
        self.products.get(id).ok_or_else(|| StoreError::UnknownProduct(id.to_owned()))
    }

    /// Most recent verdict for a pair; later records win.
    pub fn latest_feedback(&self, conference_id: &str, product_id: &str) -> Option<Verdict> {
        self.feedback
            .iter()
            .rev()
            .find(|f| f.conference_id == conference_id && f.product_id == product_id)
            .map(|f| f.verdict)
    }

    pub fn record_count(&self) -> usize {
        self.scores.values().map(Vec::len).sum()
    }
}

/// Filters applied to a conference's precomputed score list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecommendationQuery {
    pub conference_id: String,
    pub kinds: BTreeSet<ProductKind>,
    pub from_year: i32,
    pub to_year: i32,
    pub limit: usize,
    pub person: Option<String>,
}

impl RecommendationQuery {
    /// All kinds, the last three years up to `current_year`, 20 results.
    pub fn with_defaults(conference_id: impl Into<String>, current_year: i32) -> Self {
        RecommendationQuery {
            conference_id: conference_id.into(),
            kinds: ProductKind::ALL.into_iter().collect(),
            from_year: current_year - (DEFAULT_YEAR_SPAN - 1),
            to_year: current_year,
            limit: DEFAULT_LIMIT,
            person: None,
        }
    }

    pub fn validate(&self) -> Result<(), StoreError> {
        if self.from_year > self.to_year {
            return Err(StoreError::InvalidQuery(format!("from_year {} > to_year {}", self.from_year, self.to_year)));
        }
        if self.limit == 0 {
            return Err(StoreError::InvalidQuery("limit must be at least 1".into()));
        }
        Ok(())
    }

    pub fn accepts(&self, product: &ProductSummary) -> bool {
        self.kinds.contains(&product.kind)
            && product.overlaps_years(self.from_year, self.to_year)
            && self.person.as_deref().filter(|p| !p.trim().is_empty()).is_none_or(|p| product.has_person(p))
    }
}

/// Records for `q.conference_id` passing every filter, best first, at most
/// `q.limit` of them.
pub fn query_scores<'a>(catalog: &'a Catalog, q: &RecommendationQuery) -> Result<Vec<&'a SimilarityRecord>, StoreError> {
    q.validate()?;
    catalog.conference(&q.conference_id)?;
    let list = catalog.scores.get(&q.conference_id).map(Vec::as_slice).unwrap_or_default();
    Ok(list
        .iter()
        .filter(|r| catalog.products.get(&r.product_id).is_some_and(|p| q.accepts(p)))
        .take(q.limit)
        .collect())
}

/// Validate and append feedback in memory. Durability is the caller's job
/// (see [`FeedbackLog`]).
pub fn append_feedback(catalog: &mut Catalog, record: FeedbackRecord) -> Result<(), StoreError> {
    catalog.conference(&record.conference_id)?;
    catalog.product(&record.product_id)?;
    catalog.feedback.push(record);
    Ok(())
}

pub fn feedback_path(catalog_path: &Path) -> PathBuf {
    let mut name = catalog_path.as_os_str().to_owned();
    name.push(".feedback.jsonl");
    PathBuf::from(name)
}

/// Append-only feedback file. Each append is flushed and synced before
/// returning.
#[derive(Debug)]
pub struct FeedbackLog {
    file: File,
}

impl FeedbackLog {
    pub fn open(path: &Path) -> Result<Self, StoreError> {
        Ok(FeedbackLog { file: OpenOptions::new().create(true).append(true).open(path)? })
    }

    pub fn append(&mut self, record: &FeedbackRecord) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(record).map_err(|e| StoreError::Integrity(e.to_string()))?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }
}

pub fn write_catalog<W: Write>(catalog: &Catalog, mut out: W) -> Result<(), StoreError> {
    let header = serde_json::json!({"format": FORMAT_NAME, "schema_version": SCHEMA_VERSION});
    writeln!(out, "{header}")?;
    let meta = CatalogMeta { products: catalog.products.clone(), topics: catalog.topics.clone() };
    serde_json::to_writer(&mut out, &meta).map_err(|e| StoreError::Integrity(e.to_string()))?;
    writeln!(out)?;
    writeln!(out, "{SCORES_MARKER}")?;
    for r in catalog.scores.values().flatten() {
        writeln!(out, "{}\t{}\t{}", r.conference_id, r.product_id, r.score)?;
    }
    Ok(())
}

pub fn read_catalog<R: BufRead>(source: R) -> Result<Catalog, StoreError> {
    let mut lines = source.lines().enumerate();
    let mut next_line = |what: &str| -> Result<(usize, String), StoreError> {
        match lines.next() {
            Some((n, line)) => Ok((n + 1, line?)),
            None => Err(StoreError::Format { line: 0, message: format!("truncated catalog: missing {what}") }),
        }
    };

    let (n, header) = next_line("header")?;
    let header: serde_json::Value =
        serde_json::from_str(&header).map_err(|e| StoreError::Format { line: n, message: e.to_string() })?;
    if header.get("format").and_then(|v| v.as_str()) != Some(FORMAT_NAME) {
        return Err(StoreError::Format { line: n, message: "not a catalog file".into() });
    }
    let version = header.get("schema_version").and_then(|v| v.as_u64()).unwrap_or(0);
    if version != u64::from(SCHEMA_VERSION) {
        return Err(StoreError::Version { found: version });
    }

    let (n, meta) = next_line("metadata")?;
    let meta: CatalogMeta =
        serde_json::from_str(&meta).map_err(|e| StoreError::Format { line: n, message: e.to_string() })?;
    let (n, marker) = next_line("score section")?;
    if marker != SCORES_MARKER {
        return Err(StoreError::Format { line: n, message: format!("expected `{SCORES_MARKER}`") });
    }

    let mut scores: BTreeMap<String, Vec<SimilarityRecord>> = meta
        .products
        .values()
        .filter(|p| p.kind == ProductKind::ConferenceSeries)
        .map(|p| (p.product_id.clone(), Vec::new()))
        .collect();
    for (n, line) in lines {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| StoreError::Format { line: n + 1, message };
        let mut cols = line.split('\t');
        let (Some(c), Some(p), Some(s), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(bad("expected 3 tab-separated columns".into()));
        };
        let score: f64 = s.parse().map_err(|e| bad(format!("bad score `{s}`: {e}")))?;
        scores.entry(c.to_owned()).or_default().push(SimilarityRecord {
            conference_id: c.to_owned(),
            product_id: p.to_owned(),
            score,
        });
    }

    let catalog = Catalog { products: meta.products, topics: meta.topics, scores, feedback: Vec::new() };
    catalog.validate()?;
    Ok(catalog)
}

pub fn read_feedback<R: BufRead>(source: R) -> Result<Vec<FeedbackRecord>, StoreError> {
    let mut out = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| StoreError::Format { line: n + 1, message: e.to_string() })?);
    }
    Ok(out)
}

/// Write via a temporary file in the same directory, then rename over the
/// destination.
fn write_atomically(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<(), StoreError>) -> Result<(), StoreError> {
    let mut tmp_name = path.as_os_str().to_owned();
    tmp_name.push(".tmp");
    let tmp = PathBuf::from(tmp_name);
    {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        let file = w.into_inner().map_err(|e| e.into_error())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Save the catalog and replace its feedback file with `catalog.feedback`.
pub fn save_catalog(catalog: &Catalog, path: &Path) -> Result<(), StoreError> {
    catalog.validate()?;
    write_atomically(path, |w| write_catalog(catalog, w))?;
    write_atomically(&feedback_path(path), |w| {
        for f in &catalog.feedback {
            serde_json::to_writer(&mut *w, f).map_err(|e| StoreError::Integrity(e.to_string()))?;
            writeln!(w)?;
        }
        Ok(())
    })
}

/// Load a catalog and its feedback file (absent means no feedback yet).
pub fn load_catalog(path: &Path) -> Result<Catalog, StoreError> {
    let mut catalog = read_catalog(BufReader::new(File::open(path)?))?;
    match File::open(feedback_path(path)) {
        Ok(f) => catalog.feedback = read_feedback(BufReader::new(f))?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(e.into()),
    }
    Ok(catalog)
}
