//! Research-topic taxonomy: loading, equivalence classes, and the
//! broader/narrower closures used by annotation.
//!
//! The file format is JSON Lines with two record shapes:
//!
//! ```text
//! {"rec":"topic","id":"sw","label":"Semantic Web","pmc":["I18040"]}
//! {"rec":"edge","kind":"broaderGeneric","src":"ld","dst":"sw"}
//! ```
//!
//! `kind` is one of `broaderGeneric`, `narrowerGeneric`, `relatedEquivalent`
//! or `contributesTo`. Records may appear in any order. `narrowerGeneric`
//! edges are stored as `broaderGeneric` with the endpoints swapped.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::text::normalize_label;

#[derive(Debug, thiserror::Error)]
pub enum OntologyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("broaderGeneric cycle after equivalence contraction: {}", format_cycle(.0))]
    Cycle(Vec<TopicId>),
    #[error("unknown topic `{0}`")]
    UnknownTopic(TopicId),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_cycle(ids: &[TopicId]) -> String {
    let mut parts: Vec<&str> = ids.iter().map(TopicId::as_str).collect();
    if let Some(first) = ids.first() {
        parts.push(first.as_str());
    }
    parts.join(" -> ")
}

/// Opaque topic identifier, unique within one ontology file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TopicId(String);

impl TopicId {
    pub fn new(id: impl Into<String>) -> Self {
        TopicId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TopicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for TopicId {
    fn from(s: &str) -> Self {
        TopicId(s.to_owned())
    }
}

impl std::borrow::Borrow<str> for TopicId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Topic {
    pub id: TopicId,
    /// Normalized label (lowercase, NFC, single spaces).
    pub label: String,
    pub pmc_codes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RelationKind {
    #[serde(rename = "broaderGeneric")]
    BroaderGeneric,
    #[serde(rename = "relatedEquivalent")]
    RelatedEquivalent,
    #[serde(rename = "contributesTo")]
    ContributesTo,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationEdge {
    pub kind: RelationKind,
    pub src: TopicId,
    pub dst: TopicId,
}

#[derive(Deserialize)]
#[serde(tag = "rec", rename_all = "lowercase")]
enum Record {
    Topic {
        id: String,
        label: String,
        #[serde(default)]
        pmc: Vec<String>,
    },
    Edge {
        kind: RawKind,
        src: String,
        dst: String,
    },
}

#[derive(Deserialize)]
enum RawKind {
    #[serde(rename = "broaderGeneric")]
    Broader,
    #[serde(rename = "narrowerGeneric")]
    Narrower,
    #[serde(rename = "relatedEquivalent")]
    Equivalent,
    #[serde(rename = "contributesTo")]
    ContributesTo,
}

/// Immutable taxonomy with derived closure indexes.
#[derive(Debug, Clone)]
pub struct OntologyGraph {
    topics: Vec<Topic>,
    index: HashMap<TopicId, usize>,
    edges: Vec<RelationEdge>,
    canonical: Vec<usize>,
    members: Vec<Vec<usize>>,
    broader: Vec<Vec<usize>>,
    ancestors: Vec<Vec<usize>>,
    descendants: Vec<Vec<usize>>,
}

/// Read an ontology file. Blank lines are ignored.
pub fn load_ontology<R: BufRead>(source: R) -> Result<OntologyGraph, OntologyError> {
    let mut topics = Vec::new();
    let mut edges = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut edge_lines = Vec::new();

    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| OntologyError::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        match record {
            Record::Topic { id, label, pmc } => {
                if id.is_empty() {
                    return Err(OntologyError::Parse { line: line_no, message: "empty topic id".into() });
                }
                if let Some(prev) = seen.insert(id.clone(), line_no) {
                    return Err(OntologyError::Integrity(format!(
                        "line {line_no}: duplicate topic id `{id}` (first defined on line {prev})"
                    )));
                }
                let label = normalize_label(&label);
                if label.is_empty() {
                    return Err(OntologyError::Integrity(format!("line {line_no}: topic `{id}` has an empty label")));
                }
                topics.push(Topic { id: TopicId(id), label, pmc_codes: pmc });
            }
            Record::Edge { kind, src, dst } => {
                let (kind, src, dst) = match kind {
                    RawKind::Broader => (RelationKind::BroaderGeneric, src, dst),
                    RawKind::Narrower => (RelationKind::BroaderGeneric, dst, src),
                    RawKind::Equivalent => (RelationKind::RelatedEquivalent, src, dst),
                    RawKind::ContributesTo => (RelationKind::ContributesTo, src, dst),
                };
                edges.push(RelationEdge { kind, src: TopicId(src), dst: TopicId(dst) });
                edge_lines.push(line_no);
            }
        }
    }

    // Dangling references and self-edges are reported with the edge's line.
    for (edge, line) in edges.iter().zip(&edge_lines) {
        for end in [&edge.src, &edge.dst] {
            if !seen.contains_key(end.as_str()) {
                return Err(OntologyError::Integrity(format!("line {line}: edge references unknown topic `{end}`")));
            }
        }
        if edge.src == edge.dst {
            return Err(OntologyError::Integrity(format!("line {line}: self-edge on `{}`", edge.src)));
        }
    }

    OntologyGraph::from_parts(topics, edges)
}

impl OntologyGraph {
    /// Build a graph from already-parsed topics and edges. Labels are
    /// normalized here as well, so callers may pass raw strings.
    pub fn from_parts(topics: Vec<Topic>, edges: Vec<RelationEdge>) -> Result<Self, OntologyError> {
        let mut topics: Vec<Topic> = topics
            .into_iter()
            .map(|mut t| {
                t.label = normalize_label(&t.label);
                let mut seen = BTreeSet::new();
                t.pmc_codes.retain(|c| seen.insert(c.clone()));
                t
            })
            .collect();
        topics.sort_by(|a, b| a.id.cmp(&b.id));

        let mut index = HashMap::with_capacity(topics.len());
        for (i, t) in topics.iter().enumerate() {
            if t.id.as_str().is_empty() {
                return Err(OntologyError::Integrity("empty topic id".into()));
            }
            if t.label.is_empty() {
                return Err(OntologyError::Integrity(format!("topic `{}` has an empty label", t.id)));
            }
            if index.insert(t.id.clone(), i).is_some() {
                return Err(OntologyError::Integrity(format!("duplicate topic id `{}`", t.id)));
            }
        }

        let mut edges: Vec<RelationEdge> = edges.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
        for e in &edges {
            for end in [&e.src, &e.dst] {
                if !index.contains_key(end) {
                    return Err(OntologyError::Integrity(format!("edge references unknown topic `{end}`")));
                }
            }
            if e.src == e.dst {
                return Err(OntologyError::Integrity(format!("self-edge on `{}`", e.src)));
            }
        }
        edges.shrink_to_fit();

        let n = topics.len();
        let canonical = equivalence_classes(n, &index, &edges);
        let mut members = vec![Vec::new(); n];
        for (i, &rep) in canonical.iter().enumerate() {
            members[rep].push(i);
        }

        let mut broader: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for e in edges.iter().filter(|e| e.kind == RelationKind::BroaderGeneric) {
            let child = canonical[index[&e.src]];
            let parent = canonical[index[&e.dst]];
            if child == parent {
                return Err(OntologyError::Cycle(vec![topics[child].id.clone()]));
            }
            broader[child].insert(parent);
        }
        let broader: Vec<Vec<usize>> = broader.into_iter().map(|s| s.into_iter().collect()).collect();

        let order = topological_parents_first(&canonical, &broader)
            .map_err(|cycle| OntologyError::Cycle(cycle.into_iter().map(|i| topics[i].id.clone()).collect()))?;

        let mut ancestors: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &node in &order {
            let mut acc = BTreeSet::new();
            for &p in &broader[node] {
                acc.insert(p);
                acc.extend(ancestors[p].iter().copied());
            }
            ancestors[node] = acc.into_iter().collect();
        }
        let mut descendants: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (node, anc) in ancestors.iter().enumerate() {
            if canonical[node] != node {
                continue;
            }
            for &a in anc {
                descendants[a].push(node);
            }
        }

        Ok(OntologyGraph { topics, index, edges, canonical, members, broader, ancestors, descendants })
    }

    pub fn len(&self) -> usize {
        self.topics.len()
    }

    pub fn is_empty(&self) -> bool {
        self.topics.is_empty()
    }

    /// All topics, sorted by id.
    pub fn topics(&self) -> &[Topic] {
        &self.topics
    }

    /// All stored edges (narrower edges already flipped), sorted.
    pub fn edges(&self) -> &[RelationEdge] {
        &self.edges
    }

    pub fn topic(&self, id: &str) -> Result<&Topic, OntologyError> {
        self.ix(id).map(|i| &self.topics[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    /// Representative of the equivalence class of `id`: the lexicographically
    /// smallest member id.
    pub fn canonical(&self, id: &str) -> Result<&TopicId, OntologyError> {
        self.ix(id).map(|i| &self.topics[self.canonical[i]].id)
    }

    /// Canonical broader ancestors of `id`, excluding its own class.
    pub fn ancestors(&self, id: &str) -> Result<BTreeSet<TopicId>, OntologyError> {
        let rep = self.canonical[self.ix(id)?];
        Ok(self.ancestors[rep].iter().map(|&i| self.topics[i].id.clone()).collect())
    }

    /// Canonical direct broader parents of `id`'s class.
    pub fn parents(&self, id: &str) -> Result<BTreeSet<TopicId>, OntologyError> {
        let rep = self.canonical[self.ix(id)?];
        Ok(self.broader[rep].iter().map(|&i| self.topics[i].id.clone()).collect())
    }

    /// Every label whose presence marks text as being about `id`: labels of the
    /// class itself and of every narrower descendant class.
    pub fn descendant_labels(&self, id: &str) -> Result<BTreeSet<String>, OntologyError> {
        let rep = self.canonical[self.ix(id)?];
        let mut out = BTreeSet::new();
        for &class in std::iter::once(&rep).chain(&self.descendants[rep]) {
            for &m in &self.members[class] {
                out.insert(self.topics[m].label.clone());
            }
        }
        Ok(out)
    }

    /// Members of the equivalence class of `id`, sorted.
    pub fn class_members(&self, id: &str) -> Result<Vec<TopicId>, OntologyError> {
        let rep = self.canonical[self.ix(id)?];
        Ok(self.members[rep].iter().map(|&i| self.topics[i].id.clone()).collect())
    }

    /// Equivalence classes as (representative, members), sorted by representative.
    pub fn classes(&self) -> impl Iterator<Item = (&TopicId, Vec<&TopicId>)> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(move |(rep, m)| (&self.topics[rep].id, m.iter().map(|&i| &self.topics[i].id).collect()))
    }

    /// PMC codes carried by any member of `id`'s equivalence class.
    pub fn class_pmc_codes(&self, id: &str) -> Result<BTreeSet<&str>, OntologyError> {
        let rep = self.canonical[self.ix(id)?];
        Ok(self.members[rep].iter().flat_map(|&m| self.topics[m].pmc_codes.iter().map(String::as_str)).collect())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut by_label: BTreeMap<&str, BTreeSet<&TopicId>> = BTreeMap::new();
        for (i, t) in self.topics.iter().enumerate() {
            by_label.entry(&t.label).or_default().insert(&self.topics[self.canonical[i]].id);
        }
        let duplicate_labels = by_label
            .into_iter()
            .filter(|(_, classes)| classes.len() > 1)
            .map(|(label, classes)| DuplicateLabel {
                label: label.to_owned(),
                classes: classes.into_iter().cloned().collect(),
            })
            .collect();
        ValidationReport {
            duplicate_labels,
            topics_without_pmc: self.topics.iter().filter(|t| t.pmc_codes.is_empty()).map(|t| t.id.clone()).collect(),
            inert_edges: self.edges.iter().filter(|e| e.kind == RelationKind::ContributesTo).count(),
        }
    }

    /// Write the graph back out in the loader's format. Output is sorted, so
    /// two isomorphic graphs serialize to identical bytes.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.topics {
            let rec = serde_json::json!({"rec": "topic", "id": t.id, "label": t.label, "pmc": t.pmc_codes});
            writeln!(out, "{rec}")?;
        }
        for e in &self.edges {
            let rec = serde_json::json!({"rec": "edge", "kind": e.kind, "src": e.src, "dst": e.dst});
            writeln!(out, "{rec}")?;
        }
        Ok(())
    }

    fn ix(&self, id: &str) -> Result<usize, OntologyError> {
        self.index.get(id).copied().ok_or_else(|| OntologyError::UnknownTopic(TopicId::from(id)))
    }

    pub(crate) fn topic_at(&self, ix: usize) -> &Topic {
        &self.topics[ix]
    }

    pub(crate) fn canonical_ix(&self, ix: usize) -> usize {
        self.canonical[ix]
    }

    pub(crate) fn ancestors_ix(&self, rep: usize) -> &[usize] {
        &self.ancestors[rep]
    }
}

/// Union-find over equivalence edges; each topic maps to the smallest index
/// in its class, which is also the smallest id since topics are id-sorted.
fn equivalence_classes(n: usize, index: &HashMap<TopicId, usize>, edges: &[RelationEdge]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in edges.iter().filter(|e| e.kind == RelationKind::RelatedEquivalent) {
        let a = find(&mut parent, index[&e.src]);
        let b = find(&mut parent, index[&e.dst]);
        if a != b {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            parent[hi] = lo;
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Kahn's algorithm over representatives with edges child -> parent, emitting
/// parents before children. On failure returns one cycle.
fn topological_parents_first(canonical: &[usize], broader: &[Vec<usize>]) -> Result<Vec<usize>, Vec<usize>> {
    let reps: Vec<usize> = (0..canonical.len()).filter(|&i| canonical[i] == i).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); canonical.len()];
    let mut pending: Vec<usize> = vec![0; canonical.len()];
    for &r in &reps {
        pending[r] = broader[r].len();
        for &p in &broader[r] {
            children[p].push(r);
        }
    }
    let mut queue: std::collections::VecDeque<usize> = reps.iter().copied().filter(|&r| pending[r] == 0).collect();
    let mut order = Vec::with_capacity(reps.len());
    while let Some(node) = queue.pop_front() {
        order.push(node);
        for &c in &children[node] {
            pending[c] -= 1;
            if pending[c] == 0 {
                queue.push_back(c);
            }
        }
    }
    if order.len() == reps.len() {
        return Ok(order);
    }
    // Every unresolved node has an unresolved parent, so walking parents
    // from any of them must revisit a node.
    let stuck = reps.iter().copied().find(|&r| pending[r] > 0).expect("unresolved node");
    let mut path = vec![stuck];
    let mut pos: HashMap<usize, usize> = HashMap::from([(stuck, 0)]);
    let mut cur = stuck;
    loop {
        let next = broader[cur].iter().copied().find(|&p| pending[p] > 0).expect("unresolved parent");
        if let Some(&start) = pos.get(&next) {
            return Err(path.split_off(start));
        }
        pos.insert(next, path.len());
        path.push(next);
        cur = next;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DuplicateLabel {
    pub label: String,
    pub classes: Vec<TopicId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Warning: the same normalized label used by distinct equivalence classes.
    pub duplicate_labels: Vec<DuplicateLabel>,
    /// Info.
    pub topics_without_pmc: Vec<TopicId>,
    /// Info: `contributesTo` edges are kept but never used.
    pub inert_edges: usize,
}

impl ValidationReport {
    pub fn warning_count(&self) -> usize {
        self.duplicate_labels.len()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.duplicate_labels {
            let ids: Vec<&str> = d.classes.iter().map(TopicId::as_str).collect();
            writeln!(f, "warning: label \"{}\" shared by classes {}", d.label, ids.join(", "))?;
        }
        writeln!(f, "info: {} topics without PMC codes", self.topics_without_pmc.len())?;
        write!(f, "info: {} inert contributesTo edges", self.inert_edges)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(src: &str) -> Result<OntologyGraph, OntologyError> {
        load_ontology(src.as_bytes())
    }

    fn topics(ids: &[&str]) -> String {
        ids.iter()
            .map(|id| format!("{{\"rec\":\"topic\",\"id\":\"{id}\",\"label\":\"{id}\",\"pmc\":[]}}\n"))
            .collect()
    }

    fn edge(kind: &str, src: &str, dst: &str) -> String {
        format!("{{\"rec\":\"edge\",\"kind\":\"{kind}\",\"src\":\"{src}\",\"dst\":\"{dst}\"}}\n")
    }

    fn ids(set: &BTreeSet<TopicId>) -> Vec<&str> {
        set.iter().map(TopicId::as_str).collect()
    }

    #[test]
    fn single_broader_edge() {
        let g = load(&(topics(&["A", "B", "C"]) + &edge("broaderGeneric", "B", "A"))).unwrap();
        assert_eq!(ids(&g.ancestors("B").unwrap()), ["A"]);
        assert!(g.ancestors("A").unwrap().is_empty());
        assert!(g.ancestors("C").unwrap().is_empty());
    }

    #[test]
    fn equivalence_is_symmetric() {
        let g = load(&(topics(&["A", "B"]) + &edge("relatedEquivalent", "A", "B"))).unwrap();
        assert_eq!(g.classes().count(), 1);
        assert_eq!(g.canonical("B").unwrap().as_str(), "A");
        assert_eq!(g.canonical("A").unwrap().as_str(), "A");
    }

    #[test]
    fn two_cycle_rejected() {
        let src = topics(&["A", "B"]) + &edge("broaderGeneric", "A", "B") + &edge("broaderGeneric", "B", "A");
        match load(&src) {
            Err(OntologyError::Cycle(c)) => {
                let mut c: Vec<&str> = c.iter().map(TopicId::as_str).collect();
                c.sort();
                assert_eq!(c, ["A", "B"]);
            }
            other => panic!("expected cycle, got {other:?}"),
        }
    }

    #[test]
    fn cycle_through_equivalence_rejected() {
        // A -> B broader, B ~ C, C -> A broader: contracts to A <-> B
        let src = topics(&["A", "B", "C"])
            + &edge("broaderGeneric", "A", "B")
            + &edge("relatedEquivalent", "B", "C")
            + &edge("broaderGeneric", "C", "A");
        assert!(matches!(load(&src), Err(OntologyError::Cycle(_))));
    }

    #[test]
    fn broader_within_class_is_a_cycle() {
        let src = topics(&["A", "B"]) + &edge("relatedEquivalent", "A", "B") + &edge("broaderGeneric", "A", "B");
        assert!(matches!(load(&src), Err(OntologyError::Cycle(_))));
    }

    #[test]
    fn parse_error_reports_line() {
        let src = topics(&["A"]) + "{\"rec\":\"topic\",\"id\":\n";
        match load(&src) {
            Err(OntologyError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let src = topics(&["A"]) + "\n{\"rec\":\"mystery\"}\n";
        match load(&src) {
            Err(OntologyError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dangling_and_self_edges_rejected() {
        let dangling = topics(&["A"]) + &edge("broaderGeneric", "A", "Z");
        let err = load(&dangling).unwrap_err();
        assert!(matches!(err, OntologyError::Integrity(ref m) if m.contains("line 2") && m.contains("`Z`")));
        let selfy = topics(&["A"]) + &edge("contributesTo", "A", "A");
        assert!(matches!(load(&selfy), Err(OntologyError::Integrity(_))));
    }

    #[test]
    fn duplicate_id_and_empty_label_rejected() {
        assert!(matches!(load(&topics(&["A", "A"])), Err(OntologyError::Integrity(_))));
        let blank = "{\"rec\":\"topic\",\"id\":\"A\",\"label\":\"  \\t \"}\n";
        assert!(matches!(load(blank), Err(OntologyError::Integrity(_))));
    }

    #[test]
    fn canonical_is_min_id() {
        let src = topics(&["Z", "A", "M"]) + &edge("relatedEquivalent", "Z", "M") + &edge("relatedEquivalent", "M", "A");
        let g = load(&src).unwrap();
        for t in ["Z", "A", "M"] {
            assert_eq!(g.canonical(t).unwrap().as_str(), "A");
        }
        assert!(matches!(g.canonical("Q"), Err(OntologyError::UnknownTopic(_))));
    }

    #[test]
    fn chain_and_diamond_ancestors() {
        let src = topics(&["LinkedData", "SemanticWeb", "AI"])
            + &edge("broaderGeneric", "LinkedData", "SemanticWeb")
            + &edge("narrowerGeneric", "AI", "SemanticWeb");
        let g = load(&src).unwrap();
        assert_eq!(ids(&g.ancestors("LinkedData").unwrap()), ["AI", "SemanticWeb"]);

        let src = topics(&["A", "B", "C", "D"])
            + &edge("broaderGeneric", "D", "B")
            + &edge("broaderGeneric", "D", "C")
            + &edge("broaderGeneric", "B", "A")
            + &edge("broaderGeneric", "C", "A");
        let g = load(&src).unwrap();
        assert_eq!(ids(&g.ancestors("D").unwrap()), ["A", "B", "C"]);
    }

    #[test]
    fn descendant_labels_follow_narrower_and_equivalence() {
        let src = r#"{"rec":"topic","id":"sw","label":"Semantic Web"}
{"rec":"topic","id":"ld","label":"Linked  Data"}
{"rec":"topic","id":"lod","label":"Linked Open Data"}
{"rec":"edge","kind":"narrowerGeneric","src":"sw","dst":"ld"}
{"rec":"edge","kind":"relatedEquivalent","src":"ld","dst":"lod"}
"#;
        let g = load(src).unwrap();
        let labels: Vec<String> = g.descendant_labels("sw").unwrap().into_iter().collect();
        assert_eq!(labels, ["linked data", "linked open data", "semantic web"]);
        assert_eq!(g.descendant_labels("lod").unwrap().len(), 2);
    }

    #[test]
    fn two_children_give_three_labels() {
        let src = topics(&["P", "C1", "C2"]) + &edge("broaderGeneric", "C1", "P") + &edge("broaderGeneric", "C2", "P");
        let g = load(&src).unwrap();
        assert_eq!(g.descendant_labels("P").unwrap().len(), 3);
        assert_eq!(g.descendant_labels("C1").unwrap().len(), 1);
    }

    #[test]
    fn validation_report() {
        let clean = load(&topics(&["A", "B", "C"])).unwrap().validate();
        assert_eq!(clean.warning_count(), 0);
        assert_eq!(clean.topics_without_pmc.len(), 3);

        let src = r#"{"rec":"topic","id":"n1","label":"Networks","pmc":["X1","X1"]}
{"rec":"topic","id":"n2","label":"networks"}
{"rec":"topic","id":"n3","label":"Graphs"}
{"rec":"edge","kind":"contributesTo","src":"n1","dst":"n3"}
{"rec":"edge","kind":"contributesTo","src":"n2","dst":"n3"}
"#;
        let g = load(src).unwrap();
        let report = g.validate();
        assert_eq!(report.duplicate_labels.len(), 1);
        assert_eq!(report.duplicate_labels[0].label, "networks");
        assert_eq!(report.inert_edges, 2);
        assert_eq!(g.topic("n1").unwrap().pmc_codes, ["X1"]);
    }

    #[test]
    fn equivalent_duplicate_labels_are_not_warned() {
        let src = r#"{"rec":"topic","id":"a","label":"IoT"}
{"rec":"topic","id":"b","label":"iot"}
{"rec":"edge","kind":"relatedEquivalent","src":"a","dst":"b"}
"#;
        assert_eq!(load(src).unwrap().validate().warning_count(), 0);
    }

    #[test]
    fn round_trip_is_stable() {
        let src = topics(&["C", "A", "B"])
            + &edge("narrowerGeneric", "A", "B")
            + &edge("relatedEquivalent", "C", "B")
            + &edge("contributesTo", "A", "C");
        let g = load(&src).unwrap();
        let mut first = Vec::new();
        g.write_jsonl(&mut first).unwrap();
        let g2 = load_ontology(first.as_slice()).unwrap();
        let mut second = Vec::new();
        g2.write_jsonl(&mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(g.topics(), g2.topics());
        assert_eq!(g.edges(), g2.edges());
    }
}
