use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, Mutex, RwLock};

use sbr_core::annotator::DEFAULT_REDUCTION_BUDGET;
use sbr_core::corpus::ProductKind;
use sbr_core::ontology::TopicId;
use sbr_core::store::{
    append_feedback, query_scores, Catalog, FeedbackLog, FeedbackRecord, ProductSummary, RecommendationQuery, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

/// Topics shown per card and in the conference panel.
pub const TOPIC_CAP: usize = DEFAULT_REDUCTION_BUDGET;
/// Products with at least this many authors show their editors instead.
pub const AUTHOR_DISPLAY_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConferenceHit {
    pub conference_id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub acronym: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicWeight {
    pub topic_id: TopicId,
    pub label: String,
    pub weight: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PersonRole {
    Authors,
    Editors,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecommendationCard {
    pub product_id: String,
    pub title: String,
    pub kind: ProductKind,
    pub year_min: i32,
    pub year_max: i32,
    pub link: String,
    pub score: f64,
    pub top_topics: Vec<TopicWeight>,
    pub persons: Vec<String>,
    pub persons_role: PersonRole,
    pub feedback_state: Option<Verdict>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareMode {
    Conference,
    Product,
    Intersection,
    All,
}

impl std::str::FromStr for CompareMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conference" => Ok(CompareMode::Conference),
            "product" => Ok(CompareMode::Product),
            "intersection" => Ok(CompareMode::Intersection),
            "all" => Ok(CompareMode::All),
            other => Err(format!("unknown mode `{other}` (expected conference, product, intersection or all)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    ConferenceOnly,
    ProductOnly,
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonNode {
    pub topic_id: TopicId,
    pub label: String,
    pub conference_weight: u32,
    pub product_weight: u32,
    pub membership: Membership,
}

/// A broaderGeneric edge, narrower topic first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComparisonEdge {
    pub narrower: TopicId,
    pub broader: TopicId,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonGraph {
    pub conference_id: String,
    pub product_id: String,
    pub mode: CompareMode,
    pub min_weight: u32,
    pub nodes: Vec<ComparisonNode>,
    pub edges: Vec<ComparisonEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedbackRequest {
    pub conference_id: String,
    pub product_id: String,
    pub verdict: Verdict,
}

type Clock = Arc<dyn Fn() -> i64 + Send + Sync>;

fn system_clock() -> i64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs() as i64)
        .unwrap_or(0)
}

/// Read side plus the single feedback writer over one catalog snapshot.
pub struct Service {
    catalog: RwLock<Arc<Catalog>>,
    log: Mutex<Option<FeedbackLog>>,
    current_year: i32,
    clock: Clock,
}

impl Service {
    /// In-memory service; feedback is kept only for the life of the process.
    pub fn new(catalog: Catalog, current_year: i32) -> Self {
        Service { catalog: RwLock::new(Arc::new(catalog)), log: Mutex::new(None), current_year, clock: Arc::new(system_clock) }
    }

    /// Feedback is appended to `log` before it becomes visible.
    pub fn with_feedback_log(mut self, log: FeedbackLog) -> Self {
        self.log = Mutex::new(Some(log));
        self
    }

    pub fn with_clock(mut self, clock: impl Fn() -> i64 + Send + Sync + 'static) -> Self {
        self.clock = Arc::new(clock);
        self
    }

    pub fn current_year(&self) -> i32 {
        self.current_year
    }

    pub fn snapshot(&self) -> Arc<Catalog> {
        self.catalog.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Swap in a freshly built catalog. Readers holding the old snapshot
    /// finish against it.
    pub fn replace_catalog(&self, catalog: Catalog) {
        let _writer = self.log.lock().unwrap_or_else(|e| e.into_inner());
        *self.catalog.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(catalog);
    }

    pub fn default_query(&self, conference_id: impl Into<String>) -> RecommendationQuery {
        RecommendationQuery::with_defaults(conference_id, self.current_year)
    }

    pub fn search_conferences(&self, q: &str) -> Vec<ConferenceHit> {
        let needle = q.trim().to_lowercase();
        let catalog = self.snapshot();
        let mut hits: Vec<ConferenceHit> = catalog
            .conferences()
            .filter(|c| {
                c.title.to_lowercase().contains(&needle)
                    || c.acronym.as_deref().is_some_and(|a| a.to_lowercase().contains(&needle))
            })
            .map(|c| ConferenceHit { conference_id: c.product_id.clone(), name: c.title.clone(), acronym: c.acronym.clone() })
            .collect();
        hits.sort_by(|a, b| a.name.to_lowercase().cmp(&b.name.to_lowercase()).then_with(|| a.conference_id.cmp(&b.conference_id)));
        hits
    }

    pub fn conference_topics(&self, conference_id: &str) -> Result<Vec<TopicWeight>, ServiceError> {
        let catalog = self.snapshot();
        let conf = catalog.conference(conference_id)?;
        Ok(top_topics(&catalog, conf))
    }

    pub fn recommend(&self, q: &RecommendationQuery) -> Result<Vec<RecommendationCard>, ServiceError> {
        let catalog = self.snapshot();
        let records = query_scores(&catalog, q)?;
        Ok(records
            .into_iter()
            .map(|r| {
                let p = &catalog.products[&r.product_id];
                let (persons, persons_role) = if p.authors.len() < AUTHOR_DISPLAY_LIMIT {
                    (p.authors.clone(), PersonRole::Authors)
                } else {
                    (p.editors.clone(), PersonRole::Editors)
                };
                RecommendationCard {
                    product_id: p.product_id.clone(),
                    title: p.title.clone(),
                    kind: p.kind,
                    year_min: p.year_range.0,
                    year_max: p.year_range.1,
                    link: p.link(),
                    score: r.score,
                    top_topics: top_topics(&catalog, p),
                    persons,
                    persons_role,
                    feedback_state: catalog.latest_feedback(&r.conference_id, &r.product_id),
                }
            })
            .collect())
    }

    pub fn compare(
        &self,
        conference_id: &str,
        product_id: &str,
        mode: CompareMode,
        min_weight: u32,
    ) -> Result<ComparisonGraph, ServiceError> {
        let catalog = self.snapshot();
        let conf = catalog.conference(conference_id)?;
        let prod = catalog.product(product_id)?;

        let mut weights: BTreeMap<&TopicId, (u32, u32)> = BTreeMap::new();
        for (t, &w) in &conf.weights {
            weights.entry(t).or_default().0 = w;
        }
        for (t, &w) in &prod.weights {
            weights.entry(t).or_default().1 = w;
        }

        let nodes: Vec<ComparisonNode> = weights
            .into_iter()
            .filter(|&(_, (c, p))| {
                let in_mode = match mode {
                    CompareMode::Conference => c > 0,
                    CompareMode::Product => p > 0,
                    CompareMode::Intersection => c > 0 && p > 0,
                    CompareMode::All => true,
                };
                in_mode && c.max(p) >= min_weight
            })
            .map(|(t, (c, p))| ComparisonNode {
                topic_id: t.clone(),
                label: label_of(&catalog, t),
                conference_weight: c,
                product_weight: p,
                membership: match (c > 0, p > 0) {
                    (true, true) => Membership::Both,
                    (true, false) => Membership::ConferenceOnly,
                    _ => Membership::ProductOnly,
                },
            })
            .collect();

        let present: BTreeSet<&TopicId> = nodes.iter().map(|n| &n.topic_id).collect();
        let mut edges: Vec<ComparisonEdge> = nodes
            .iter()
            .flat_map(|n| {
                let broader = catalog.topics.get(&n.topic_id).map(|i| i.broader.as_slice()).unwrap_or_default();
                broader
                    .iter()
                    .filter(|b| present.contains(b))
                    .map(|b| ComparisonEdge { narrower: n.topic_id.clone(), broader: b.clone() })
            })
            .collect();
        edges.sort();
        edges.dedup();

        Ok(ComparisonGraph {
            conference_id: conf.product_id.clone(),
            product_id: prod.product_id.clone(),
            mode,
            min_weight,
            nodes,
            edges,
        })
    }

    /// Validate, persist, then publish a feedback record.
    pub fn submit_feedback(&self, req: FeedbackRequest) -> Result<FeedbackRecord, ServiceError> {
        let mut log = self.log.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot();
        current.conference(&req.conference_id)?;
        current.product(&req.product_id)?;

        let record = FeedbackRecord {
            conference_id: req.conference_id,
            product_id: req.product_id,
            verdict: req.verdict,
            timestamp: (self.clock)(),
        };
        if let Some(log) = log.as_mut() {
            log.append(&record)?;
        }
        drop(current);
        let mut guard = self.catalog.write().unwrap_or_else(|e| e.into_inner());
        append_feedback(Arc::make_mut(&mut guard), record.clone())?;
        tracing::debug!(conference = %record.conference_id, product = %record.product_id, "feedback stored");
        Ok(record)
    }
}

fn label_of(catalog: &Catalog, t: &TopicId) -> String {
    catalog.topics.get(t).map_or_else(|| t.to_string(), |i| i.label.clone())
}

fn top_topics(catalog: &Catalog, p: &ProductSummary) -> Vec<TopicWeight> {
    p.reduced
        .iter()
        .take(TOPIC_CAP)
        .map(|(t, w)| TopicWeight { topic_id: t.clone(), label: label_of(catalog, t), weight: *w })
        .collect()
}
