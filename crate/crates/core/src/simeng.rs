//! Batch similarity between conference series and every other product.
//!
//! Each (conference, product) pair first passes a Jaccard gate over topic
//! supports; only survivors get a cosine score, and only scores above the
//! persistence threshold are kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotator::TopicDistribution;
use crate::ontology::TopicId;

pub const DEFAULT_JACCARD_THRESHOLD: f64 = 0.125;
pub const DEFAULT_COSINE_THRESHOLD: f64 = 0.5;

#[derive(Debug, thiserror::Error)]
pub enum SimEngError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("vector `{product_id}`: weight for `{topic}` must be finite and positive, got {weight}")]
    InvalidWeight { product_id: String, topic: TopicId, weight: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Sparse topic-weight vector of one product.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicVector {
    product_id: String,
    entries: BTreeMap<TopicId, f64>,
}

impl TopicVector {
    pub fn new(product_id: impl Into<String>, entries: BTreeMap<TopicId, f64>) -> Result<Self, SimEngError> {
        let product_id = product_id.into();
        if let Some((topic, &weight)) = entries.iter().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(SimEngError::InvalidWeight { product_id, topic: topic.clone(), weight });
        }
        Ok(TopicVector { product_id, entries })
    }

    pub fn from_distribution(dist: &TopicDistribution) -> Self {
        TopicVector {
            product_id: dist.product_id.clone(),
            entries: dist.weights.iter().map(|(t, &w)| (t.clone(), f64::from(w))).collect(),
        }
    }

    pub fn product_id(&self) -> &str {
        &self.product_id
    }

    pub fn entries(&self) -> &BTreeMap<TopicId, f64> {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiply every weight by `k` (must be positive).
    pub fn scaled(&self, k: f64) -> Result<Self, SimEngError> {
        TopicVector::new(self.product_id.clone(), self.entries.iter().map(|(t, w)| (t.clone(), w * k)).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimEngConfig {
    pub jaccard_threshold: f64,
    pub cosine_threshold: f64,
    /// Persist scores equal to the cosine threshold. Off by default: only
    /// scores strictly above it are kept.
    #[serde(default)]
    pub inclusive_cosine: bool,
}

impl Default for SimEngConfig {
    fn default() -> Self {
        SimEngConfig {
            jaccard_threshold: DEFAULT_JACCARD_THRESHOLD,
            cosine_threshold: DEFAULT_COSINE_THRESHOLD,
            inclusive_cosine: false,
        }
    }
}

impl SimEngConfig {
    pub fn validate(&self) -> Result<(), SimEngError> {
        for (name, v) in [("jaccard_threshold", self.jaccard_threshold), ("cosine_threshold", self.cosine_threshold)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(SimEngError::Config(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn passes_jaccard(&self, j: f64) -> bool {
        j >= self.jaccard_threshold
    }

    pub fn persists(&self, score: f64) -> bool {
        if self.inclusive_cosine {
            score >= self.cosine_threshold
        } else {
            score > self.cosine_threshold
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityRecord {
    pub conference_id: String,
    pub product_id: String,
    pub score: f64,
}

/// Set Jaccard over the two supports; weights are ignored. Two empty vectors
/// score 0.
pub fn jaccard(a: &TopicVector, b: &TopicVector) -> f64 {
    let shared = a.entries.keys().filter(|t| b.entries.contains_key(*t)).count();
    let union = a.entries.len() + b.entries.len() - shared;
    if union == 0 {
        0.0
    } else {
        shared as f64 / union as f64
    }
}

/// Cosine of the angle between the weight vectors; 0 if either is empty.
pub fn cosine(a: &TopicVector, b: &TopicVector) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let dot: f64 = a.entries.iter().filter_map(|(t, wa)| b.entries.get(t).map(|wb| wa * wb)).sum();
    dot / (norm(a.entries.values().copied()) * norm(b.entries.values().copied()))
}

fn norm(weights: impl Iterator<Item = f64>) -> f64 {
    weights.map(|w| w * w).sum::<f64>().sqrt()
}

/// Vector with topics interned to dense ids in TopicId order, so merges walk
/// the same sequence a BTreeMap iteration would.
struct Packed<'a> {
    product_id: &'a str,
    entries: Vec<(u32, f64)>,
    norm: f64,
}

impl<'a> Packed<'a> {
    fn pack(vectors: &'a [TopicVector], intern: &HashMap<&TopicId, u32>) -> Vec<Packed<'a>> {
        vectors
            .iter()
            .map(|v| Packed {
                product_id: &v.product_id,
                entries: v.entries.iter().map(|(t, &w)| (intern[t], w)).collect(),
                norm: norm(v.entries.values().copied()),
            })
            .collect()
    }

    fn jaccard(&self, other: &Packed<'_>) -> f64 {
        let (mut i, mut j, mut shared) = (0, 0, 0usize);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    shared += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        let union = self.entries.len() + other.entries.len() - shared;
        if union == 0 {
            0.0
        } else {
            shared as f64 / union as f64
        }
    }

    fn cosine(&self, other: &Packed<'_>) -> f64 {
        if self.entries.is_empty() || other.entries.is_empty() {
            return 0.0;
        }
        let (mut i, mut j, mut dot) = (0, 0, 0.0f64);
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    dot += self.entries[i].1 * other.entries[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        dot / (self.norm * other.norm)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneStats {
    pub candidate_pairs: u64,
    pub surviving_jaccard: u64,
    pub emitted: u64,
}

impl PruneStats {
    fn add(mut self, other: PruneStats) -> PruneStats {
        self.candidate_pairs += other.candidate_pairs;
        self.surviving_jaccard += other.surviving_jaccard;
        self.emitted += other.emitted;
        self
    }
}

impl fmt::Display for PruneStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "candidate_pairs={} surviving_jaccard={} emitted={}",
            self.candidate_pairs, self.surviving_jaccard, self.emitted
        )
    }
}

/// Score every conference against every product except itself, using the
/// global rayon pool.
pub fn precompute(
    conferences: &[TopicVector],
    products: &[TopicVector],
    cfg: &SimEngConfig,
) -> Result<Vec<SimilarityRecord>, SimEngError> {
    run(conferences, products, cfg).map(|(records, _)| records)
}

/// Same as [`precompute`] on a dedicated pool of `workers` threads. Output
/// does not depend on the worker count.
pub fn precompute_with_workers(
    conferences: &[TopicVector],
    products: &[TopicVector],
    cfg: &SimEngConfig,
    workers: usize,
) -> Result<(Vec<SimilarityRecord>, PruneStats), SimEngError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SimEngError::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| run(conferences, products, cfg))
}

pub fn prune_stats(conferences: &[TopicVector], products: &[TopicVector], cfg: &SimEngConfig) -> Result<PruneStats, SimEngError> {
    run(conferences, products, cfg).map(|(_, stats)| stats)
}

fn run(
    conferences: &[TopicVector],
    products: &[TopicVector],
    cfg: &SimEngConfig,
) -> Result<(Vec<SimilarityRecord>, PruneStats), SimEngError> {
    cfg.validate()?;
    let topics: BTreeSet<&TopicId> = conferences.iter().chain(products).flat_map(|v| v.entries.keys()).collect();
    let intern: HashMap<&TopicId, u32> = topics.into_iter().enumerate().map(|(i, t)| (t, i as u32)).collect();
    let mut confs = Packed::pack(conferences, &intern);
    confs.sort_by(|a, b| a.product_id.cmp(b.product_id));
    let prods = Packed::pack(products, &intern);

    let slices: Vec<(Vec<SimilarityRecord>, PruneStats)> = confs
        .par_iter()
        .map(|conf| {
            let mut stats = PruneStats::default();
            let mut out = Vec::new();
            for prod in prods.iter().filter(|p| p.product_id != conf.product_id) {
                stats.candidate_pairs += 1;
                if !cfg.passes_jaccard(conf.jaccard(prod)) {
                    continue;
                }
                stats.surviving_jaccard += 1;
                if conf.entries.is_empty() || prod.entries.is_empty() {
                    continue;
                }
                let score = conf.cosine(prod);
                if cfg.persists(score) {
                    stats.emitted += 1;
                    out.push(SimilarityRecord {
                        conference_id: conf.product_id.to_owned(),
                        product_id: prod.product_id.to_owned(),
                        score,
                    });
                }
            }
            out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.product_id.cmp(&b.product_id)));
            (out, stats)
        })
        .collect();

    let mut records = Vec::new();
    let mut stats = PruneStats::default();
    for (slice, s) in slices {
        records.extend(slice);
        stats = stats.add(s);
    }
    Ok((records, stats))
}

/// Tab-separated dump: conference, product, score to six decimals.
pub fn write_tsv<W: Write>(records: &[SimilarityRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}\t{}\t{:.6}", r.conference_id, r.product_id, r.score)?;
    }
    Ok(())
}

pub fn read_tsv<R: BufRead>(source: R) -> Result<Vec<SimilarityRecord>, SimEngError> {
    let mut records = Vec::new();
    for (n, line) in source.lines().enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let parse_err = |message: String| SimEngError::Parse { line: n + 1, message };
        let mut cols = line.split('\t');
        let (Some(c), Some(p), Some(s), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
            return Err(parse_err("expected 3 tab-separated columns".into()));
        };
        let score: f64 = s.parse().map_err(|e| parse_err(format!("bad score `{s}`: {e}")))?;
        records.push(SimilarityRecord { conference_id: c.to_owned(), product_id: p.to_owned(), score });
    }
    Ok(records)
}
