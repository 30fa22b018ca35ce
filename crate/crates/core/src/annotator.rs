//! Topic detection for chapters and products.
//!
//! A chapter is about topic `T` when its title, abstract, or one of its
//! keywords contains a label of `T`, of a topic equivalent to `T`, or of any
//! narrower descendant of `T`. Every detected topic also drags in its broader
//! ancestors, so a product's topic weights are monotone up the hierarchy.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{ChapterRecord, ProductDescriptor};
use crate::ontology::{OntologyGraph, TopicId};
use crate::text::tokenize;

/// Default size of the reduced topic list, matching the card display.
pub const DEFAULT_REDUCTION_BUDGET: usize = 15;

/// Exact-cover fallback gives up after visiting this many search nodes.
const EXACT_COVER_NODE_LIMIT: usize = 1 << 20;

#[derive(Debug, Default, Clone)]
struct TrieNode {
    next: HashMap<String, u32>,
    labels: Vec<u32>,
}

/// Compiled label dictionary: each normalized label maps to every canonical
/// topic it triggers. Matching runs over token sequences, so labels only hit
/// at word boundaries.
#[derive(Debug, Clone)]
pub struct LabelMatcher {
    labels: Vec<String>,
    label_topics: Vec<Vec<u32>>,
    topics: Vec<TopicId>,
    trie: Vec<TrieNode>,
}

impl LabelMatcher {
    pub fn build(graph: &OntologyGraph) -> Self {
        let mut by_label: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
        for (ix, topic) in graph.topics().iter().enumerate() {
            let rep = graph.canonical_ix(ix);
            let entry = by_label.entry(&topic.label).or_default();
            entry.insert(rep);
            entry.extend(graph.ancestors_ix(rep).iter().copied());
        }

        let used: BTreeSet<usize> = by_label.values().flatten().copied().collect();
        let slot: HashMap<usize, u32> = used.iter().enumerate().map(|(s, &ix)| (ix, s as u32)).collect();
        let topics: Vec<TopicId> = used.iter().map(|&ix| graph.topic_at(ix).id.clone()).collect();

        let mut matcher = LabelMatcher {
            labels: Vec::with_capacity(by_label.len()),
            label_topics: Vec::with_capacity(by_label.len()),
            topics,
            trie: vec![TrieNode::default()],
        };
        for (label, reps) in by_label {
            let label_ix = matcher.labels.len() as u32;
            matcher.labels.push(label.to_owned());
            matcher.label_topics.push(reps.iter().map(|r| slot[r]).collect());
            let tokens = tokenize(label);
            if tokens.is_empty() {
                continue;
            }
            let mut node = 0usize;
            for tok in tokens {
                node = match matcher.trie[node].next.get(&tok) {
                    Some(&n) => n as usize,
                    None => {
                        let n = matcher.trie.len();
                        matcher.trie.push(TrieNode::default());
                        matcher.trie[node].next.insert(tok, n as u32);
                        n
                    }
                };
            }
            matcher.trie[node].labels.push(label_ix);
        }
        matcher
    }

    /// Number of dictionary keys.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Topics triggered by a normalized label, if it is a key.
    pub fn topics_for(&self, label: &str) -> Option<Vec<&TopicId>> {
        let ix = self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()?;
        Some(self.label_topics[ix].iter().map(|&s| &self.topics[s as usize]).collect())
    }

    /// Dictionary entries in label order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, Vec<&TopicId>)> + '_ {
        self.labels
            .iter()
            .zip(&self.label_topics)
            .map(move |(l, ts)| (l.as_str(), ts.iter().map(|&s| &self.topics[s as usize]).collect()))
    }

    /// Labels occurring in one scan unit, as dictionary indexes.
    fn scan(&self, text: &str, hits: &mut BTreeSet<u32>) {
        let tokens = tokenize(text);
        for start in 0..tokens.len() {
            let mut node = 0usize;
            for tok in &tokens[start..] {
                match self.trie[node].next.get(tok) {
                    Some(&n) => node = n as usize,
                    None => break,
                }
                hits.extend(self.trie[node].labels.iter().copied());
            }
        }
    }

    /// Labels found in a chapter. Title, abstract, and each keyword are
    /// scanned separately so a label never spans two of them.
    pub fn matched_labels(&self, chapter: &ChapterRecord) -> Vec<&str> {
        let mut hits = BTreeSet::new();
        self.scan_chapter(chapter, &mut hits);
        hits.into_iter().map(|i| self.labels[i as usize].as_str()).collect()
    }

    fn scan_chapter(&self, chapter: &ChapterRecord, hits: &mut BTreeSet<u32>) {
        self.scan(&chapter.title, hits);
        self.scan(&chapter.r#abstract, hits);
        for kw in &chapter.keywords {
            self.scan(kw, hits);
        }
    }

    /// Canonical topics detected in a chapter, each counted once.
    pub fn match_chapter(&self, chapter: &ChapterRecord) -> BTreeSet<TopicId> {
        let mut hits = BTreeSet::new();
        self.scan_chapter(chapter, &mut hits);
        let slots: BTreeSet<u32> = hits.into_iter().flat_map(|l| self.label_topics[l as usize].iter().copied()).collect();
        slots.into_iter().map(|s| self.topics[s as usize].clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicDistribution {
    pub product_id: String,
    /// Canonical topic -> number of chapters it was detected in.
    pub weights: BTreeMap<TopicId, u32>,
    /// Every chapter of the product, including those with no topics.
    pub chapter_topics: BTreeMap<String, BTreeSet<TopicId>>,
}

impl TopicDistribution {
    pub fn from_chapter_topics(product_id: impl Into<String>, chapter_topics: BTreeMap<String, BTreeSet<TopicId>>) -> Self {
        let mut weights: BTreeMap<TopicId, u32> = BTreeMap::new();
        for topics in chapter_topics.values() {
            for t in topics {
                *weights.entry(t.clone()).or_default() += 1;
            }
        }
        TopicDistribution { product_id: product_id.into(), weights, chapter_topics }
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Detect topics in every chapter of a product and close them upwards.
pub fn annotate_product(matcher: &LabelMatcher, graph: &OntologyGraph, product: &ProductDescriptor) -> TopicDistribution {
    let chapter_topics = product
        .chapters
        .iter()
        .map(|ch| {
            let direct = matcher.match_chapter(ch);
            let mut closed = direct.clone();
            for t in &direct {
                if let Ok(anc) = graph.ancestors(t.as_str()) {
                    closed.extend(anc);
                }
            }
            (ch.chapter_id.clone(), closed)
        })
        .collect();
    TopicDistribution::from_chapter_topics(&product.product_id, chapter_topics)
}

/// Short topic list ordered by weight descending, ties by topic id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ReducedTopicList(pub Vec<(TopicId, u32)>);

impl ReducedTopicList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, (TopicId, u32)> {
        self.0.iter()
    }
}

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] & (1 << (i % 64)) != 0
    }

    fn gain(&self, covered: &Bits) -> u32 {
        self.0.iter().zip(&covered.0).map(|(a, c)| (a & !c).count_ones()).sum()
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }

    fn difference_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a &= !b;
        }
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
}

struct CoverInstance<'a> {
    topics: Vec<(&'a TopicId, u32, Bits)>,
    universe: usize,
}

/// Reduce a distribution to at most `budget` topics that cover every
/// topic-bearing chapter.
///
/// Greedy: repeatedly take the topic covering the most uncovered chapters,
/// ties by total weight then by id. If the budget runs out before the
/// chapters are covered, a bounded exact search looks for a cover that fits.
/// Leftover slots go to the heaviest unchosen topics.
pub fn reduce_topics(dist: &TopicDistribution, budget: usize) -> ReducedTopicList {
    let budget = budget.max(1);
    let chapters: Vec<&BTreeSet<TopicId>> = dist.chapter_topics.values().filter(|t| !t.is_empty()).collect();
    let mut coverage: BTreeMap<&TopicId, Bits> = BTreeMap::new();
    for (i, topics) in chapters.iter().enumerate() {
        for t in *topics {
            coverage.entry(t).or_insert_with(|| Bits::new(chapters.len())).set(i);
        }
    }
    let instance = CoverInstance {
        topics: coverage.into_iter().map(|(t, bits)| (t, dist.weights.get(t).copied().unwrap_or(0), bits)).collect(),
        universe: chapters.len(),
    };

    let mut chosen = greedy_cover(&instance, budget);
    if !instance.covers(&chosen) {
        if let Some(exact) = instance.exact_cover(budget) {
            chosen = exact;
        }
    }

    let mut rest: Vec<usize> = (0..instance.topics.len()).filter(|i| !chosen.contains(i)).collect();
    rest.sort_by(|&a, &b| instance.heavier_first(a, b));
    chosen.extend(rest.into_iter().take(budget.saturating_sub(chosen.len())));
    chosen.sort_by(|&a, &b| instance.heavier_first(a, b));

    ReducedTopicList(chosen.into_iter().map(|i| (instance.topics[i].0.clone(), instance.topics[i].1)).collect())
}

fn greedy_cover(instance: &CoverInstance<'_>, budget: usize) -> Vec<usize> {
    let mut covered = Bits::new(instance.universe);
    let mut chosen = Vec::new();
    while chosen.len() < budget && (covered.count() as usize) < instance.universe {
        let best = (0..instance.topics.len())
            .filter(|i| !chosen.contains(i))
            .map(|i| (instance.topics[i].2.gain(&covered), i))
            .filter(|&(gain, _)| gain > 0)
            .max_by(|&(ga, a), &(gb, b)| ga.cmp(&gb).then_with(|| instance.heavier_first(b, a)));
        let Some((_, i)) = best else { break };
        covered.union_with(&instance.topics[i].2);
        chosen.push(i);
    }
    chosen
}

impl CoverInstance<'_> {
    fn heavier_first(&self, a: usize, b: usize) -> std::cmp::Ordering {
        let (ta, wa, _) = &self.topics[a];
        let (tb, wb, _) = &self.topics[b];
        wb.cmp(wa).then_with(|| ta.cmp(tb))
    }

    fn covers(&self, chosen: &[usize]) -> bool {
        let mut covered = Bits::new(self.universe);
        for &i in chosen {
            covered.union_with(&self.topics[i].2);
        }
        covered.count() as usize == self.universe
    }

    /// Smallest cover of size <= budget, found by iterative deepening and
    /// branching on the first uncovered chapter. None if there is none or the
    /// node limit is hit.
    fn exact_cover(&self, budget: usize) -> Option<Vec<usize>> {
        let mut order: Vec<usize> = (0..self.topics.len()).collect();
        order.sort_by(|&a, &b| self.topics[b].2.count().cmp(&self.topics[a].2.count()).then_with(|| self.heavier_first(a, b)));
        let mut nodes = 0usize;
        let mut uncovered = Bits::new(self.universe);
        for i in 0..self.universe {
            uncovered.set(i);
        }
        for depth in 1..=budget.min(self.topics.len()) {
            let mut picked = Vec::new();
            match self.search(&order, &uncovered, depth, &mut picked, &mut nodes) {
                Some(true) => return Some(picked),
                Some(false) => continue,
                None => return None,
            }
        }
        None
    }

    fn search(&self, order: &[usize], uncovered: &Bits, left: usize, picked: &mut Vec<usize>, nodes: &mut usize) -> Option<bool> {
        *nodes += 1;
        if *nodes > EXACT_COVER_NODE_LIMIT {
            return None;
        }
        let Some(first) = (0..self.universe).find(|&i| uncovered.get(i)) else {
            return Some(true);
        };
        if left == 0 {
            return Some(false);
        }
        for &t in order {
            if picked.contains(&t) || !self.topics[t].2.get(first) {
                continue;
            }
            let mut rest = uncovered.clone();
            rest.difference_with(&self.topics[t].2);
            picked.push(t);
            if self.search(order, &rest, left - 1, picked, nodes)? {
                return Some(true);
            }
            picked.pop();
        }
        Some(false)
    }
}

/// PMC code -> number of chapters carrying at least one topic with that code.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PmcDistribution(pub BTreeMap<String, u32>);

pub fn infer_pmcs(graph: &OntologyGraph, dist: &TopicDistribution) -> PmcDistribution {
    let mut counts: BTreeMap<String, u32> = BTreeMap::new();
    for topics in dist.chapter_topics.values() {
        let codes: BTreeSet<&str> = topics.iter().filter_map(|t| graph.class_pmc_codes(t.as_str()).ok()).flatten().collect();
        for code in codes {
            *counts.entry(code.to_owned()).or_default() += 1;
        }
    }
    PmcDistribution(counts)
}

/// One line of the optional annotation dump.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub product_id: String,
    pub weights: BTreeMap<TopicId, u32>,
    pub reduced: ReducedTopicList,
    pub pmc: PmcDistribution,
}
