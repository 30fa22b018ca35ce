use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sbr_core::annotator::{annotate_product, reduce_topics, LabelMatcher, TopicDistribution};
use sbr_core::corpus::{ChapterRecord, ParentKind, ProductDescriptor, ProductKind};
use sbr_core::ontology::{load_ontology, OntologyGraph, RelationKind, TopicId};

const ONTOLOGY: &str = include_str!("../../../fixtures/demo/ontology.jsonl");

fn graph() -> OntologyGraph {
    load_ontology(ONTOLOGY.as_bytes()).unwrap()
}

fn vocabulary(g: &OntologyGraph) -> Vec<String> {
    let mut words: BTreeSet<String> = g.topics().iter().flat_map(|t| sbr_core::text::tokenize(&t.label)).collect();
    words.extend(["the", "of", "for", "novel", "approach", "bio", "x"].map(String::from));
    words.into_iter().collect()
}

fn text(vocab: &[String]) -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vocab.to_vec()), 0..12).prop_map(|w| w.join(" "))
}

fn chapter(id: usize, title: String, abs: String, keywords: Vec<String>) -> ChapterRecord {
    ChapterRecord {
        chapter_id: format!("c{id:03}"),
        title: if title.is_empty() { "untitled".into() } else { title },
        r#abstract: abs,
        keywords,
        year: 2017,
        authors: vec![],
        parent_doi: "d".into(),
        parent_kind: ParentKind::Book,
        parent_title: "B".into(),
        editors: vec![],
        conference_series_id: None,
        conference_series_name: None,
        conference_acronym: None,
    }
}

fn chapters(vocab: &[String]) -> impl Strategy<Value = Vec<ChapterRecord>> {
    prop::collection::vec((text(vocab), text(vocab), prop::collection::vec(text(vocab), 0..3)), 1..8).prop_map(|cs| {
        cs.into_iter().enumerate().map(|(i, (t, a, k))| chapter(i, t, a, k)).collect()
    })
}

fn product(chapters: Vec<ChapterRecord>) -> ProductDescriptor {
    ProductDescriptor {
        product_id: "book:d".into(),
        kind: ProductKind::Book,
        display_title: "B".into(),
        year_range: (2017, 2017),
        chapters,
        authors: vec![],
        editors: vec![],
        doi: "d".into(),
        acronym: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closure_monotonicity(chs in chapters(&vocabulary(&graph()))) {
        let g = graph();
        let m = LabelMatcher::build(&g);
        let d = annotate_product(&m, &g, &product(chs.clone()));
        for e in g.edges().iter().filter(|e| e.kind == RelationKind::BroaderGeneric) {
            let child = g.canonical(e.src.as_str()).unwrap();
            let parent = g.canonical(e.dst.as_str()).unwrap();
            let wc = d.weights.get(child).copied().unwrap_or(0);
            let wp = d.weights.get(parent).copied().unwrap_or(0);
            prop_assert!(wp >= wc, "{parent}={wp} < {child}={wc}");
        }
        for (t, &w) in &d.weights {
            prop_assert!(w >= 1 && w as usize <= chs.len());
            let count = d.chapter_topics.values().filter(|s| s.contains(t)).count();
            prop_assert_eq!(w as usize, count);
        }
    }

    #[test]
    fn matching_is_monotone(base in text(&vocabulary(&graph())), extra in text(&vocabulary(&graph()))) {
        let g = graph();
        let m = LabelMatcher::build(&g);
        let before = m.match_chapter(&chapter(0, base.clone(), String::new(), vec![]));
        let after = m.match_chapter(&chapter(0, format!("{base} {extra}"), String::new(), vec![]));
        prop_assert!(after.is_superset(&before));
    }

    #[test]
    fn permutation_invariant(chs in chapters(&vocabulary(&graph())), seed in any::<u64>()) {
        let g = graph();
        let m = LabelMatcher::build(&g);
        let mut shuffled = chs.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(i + 7) % (i + 1));
        }
        prop_assert_eq!(annotate_product(&m, &g, &product(chs)), annotate_product(&m, &g, &product(shuffled)));
    }
}

/// Random cover instance: chapter -> set of topic ids.
fn cover_instance() -> impl Strategy<Value = (TopicDistribution, usize)> {
    (1usize..=12, 1usize..=8).prop_flat_map(|(chapters, topics)| {
        (
            prop::collection::vec(prop::collection::btree_set(0..topics, 0..=topics.min(4)), chapters),
            1..=topics,
        )
            .prop_map(|(rows, budget)| {
                let chapter_topics: BTreeMap<String, BTreeSet<TopicId>> = rows
                    .into_iter()
                    .enumerate()
                    .map(|(i, ts)| (format!("c{i:02}"), ts.into_iter().map(|t| TopicId::new(format!("t{t}"))).collect()))
                    .collect();
                (TopicDistribution::from_chapter_topics("p", chapter_topics), budget)
            })
    })
}

/// Exhaustive search over every subset of at most `budget` topics.
fn brute_force_cover_exists(d: &TopicDistribution, budget: usize) -> bool {
    let topics: Vec<&TopicId> = d.weights.keys().collect();
    let universe: Vec<&BTreeSet<TopicId>> = d.chapter_topics.values().filter(|s| !s.is_empty()).collect();
    (0u32..1 << topics.len()).filter(|mask| mask.count_ones() as usize <= budget).any(|mask| {
        universe.iter().all(|ch| (0..topics.len()).any(|i| mask & (1 << i) != 0 && ch.contains(topics[i])))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn cover_found_whenever_one_exists((d, budget) in cover_instance()) {
        let reduced = reduce_topics(&d, budget);
        let picked: BTreeSet<&TopicId> = reduced.iter().map(|(t, _)| t).collect();
        let covered = d.chapter_topics.values().filter(|s| !s.is_empty()).all(|s| s.iter().any(|t| picked.contains(t)));
        if brute_force_cover_exists(&d, budget) {
            prop_assert!(covered);
        }
        prop_assert_eq!(reduced.len(), budget.min(d.weights.len()));
        for (t, w) in reduced.iter() {
            prop_assert_eq!(d.weights.get(t), Some(w));
        }
        let order: Vec<(std::cmp::Reverse<u32>, &TopicId)> = reduced.iter().map(|(t, w)| (std::cmp::Reverse(*w), t)).collect();
        prop_assert!(order.windows(2).all(|w| w[0] <= w[1]));
        prop_assert_eq!(reduce_topics(&d, budget), reduced);
    }
}
