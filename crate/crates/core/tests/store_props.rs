use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use sbr_core::annotator::{PmcDistribution, ReducedTopicList};
use sbr_core::corpus::ProductKind;
use sbr_core::ontology::TopicId;
use sbr_core::simeng::SimilarityRecord;
use sbr_core::store::{
    load_catalog, query_scores, save_catalog, Catalog, FeedbackRecord, ProductSummary, RecommendationQuery, TopicInfo,
    Verdict,
};

const PEOPLE: [&str; 4] = ["Ada Lovelace", "Alan Turing", "Grace Hopper", "Edsger Dijkstra"];

type SummaryParts = (ProductKind, (i32, i32), Vec<String>, Vec<String>, BTreeMap<String, u32>);

fn summary() -> impl Strategy<Value = SummaryParts> {
    (
        prop::sample::select(ProductKind::ALL.to_vec()),
        (2010i32..2020, 0i32..5),
        prop::collection::vec(prop::sample::select(PEOPLE.to_vec()).prop_map(String::from), 0..3),
        prop::collection::vec(prop::sample::select(PEOPLE.to_vec()).prop_map(String::from), 0..2),
        prop::collection::btree_map("[a-e]", 1u32..9, 0..5),
    )
        .prop_map(|(k, (y, span), a, e, w)| (k, (y, y + span), a, e, w))
}

fn catalog() -> impl Strategy<Value = Catalog> {
    (prop::collection::vec(summary(), 1..25), prop::collection::vec((0usize..25, 0usize..25, 0.5f64..=1.0), 0..60))
        .prop_map(|(summaries, pairs)| {
            let mut products = BTreeMap::new();
            for (i, (kind, years, authors, editors, weights)) in summaries.into_iter().enumerate() {
                // product 0 is always a conference
                let kind = if i == 0 { ProductKind::ConferenceSeries } else { kind };
                let id = format!("{}:{i:02}", kind.as_str());
                let weights: BTreeMap<TopicId, u32> = weights.into_iter().map(|(t, w)| (TopicId::new(t), w)).collect();
                products.insert(
                    id.clone(),
                    ProductSummary {
                        product_id: id,
                        kind,
                        title: format!("Product {i}"),
                        year_range: years,
                        doi: format!("10.1/{i}"),
                        acronym: (i % 3 == 0).then(|| format!("P{i}")),
                        authors,
                        editors,
                        chapter_count: 3,
                        reduced: ReducedTopicList(weights.iter().take(2).map(|(t, w)| (t.clone(), *w)).collect()),
                        weights,
                        pmc: PmcDistribution(BTreeMap::from([("X".to_string(), 1)])),
                    },
                );
            }
            let ids: Vec<&ProductSummary> = products.values().collect();
            let confs: Vec<&ProductSummary> = ids.iter().copied().filter(|p| p.kind == ProductKind::ConferenceSeries).collect();
            let mut seen = BTreeSet::new();
            let records: Vec<SimilarityRecord> = pairs
                .into_iter()
                .filter_map(|(c, p, s)| {
                    let c = confs[c % confs.len()];
                    let p = ids[p % ids.len()];
                    (c.product_id != p.product_id && seen.insert((c.product_id.clone(), p.product_id.clone()))).then(|| {
                        SimilarityRecord { conference_id: c.product_id.clone(), product_id: p.product_id.clone(), score: s }
                    })
                })
                .collect();
            let topics = BTreeMap::from([(TopicId::from("a"), TopicInfo { label: "a".into(), broader: vec![] })]);
            let mut catalog = Catalog::new(products, topics, records).unwrap();
            if let Some(r) = catalog.scores.values().flatten().next().cloned() {
                catalog.feedback.push(FeedbackRecord {
                    conference_id: r.conference_id,
                    product_id: r.product_id,
                    verdict: Verdict::Negative,
                    timestamp: 1_500_000_000,
                });
            }
            catalog
        })
}

fn query(conference_id: String) -> impl Strategy<Value = RecommendationQuery> {
    (
        prop::collection::btree_set(prop::sample::select(ProductKind::ALL.to_vec()), 1..=3),
        2008i32..2022,
        0i32..6,
        1usize..10,
        prop::option::of(prop::sample::select(vec!["lovelace", "TURING", "grace", "nobody"]).prop_map(String::from)),
    )
        .prop_map(move |(kinds, from, span, limit, person)| RecommendationQuery {
            conference_id: conference_id.clone(),
            kinds,
            from_year: from,
            to_year: from + span,
            limit,
            person,
        })
}

fn with_query() -> impl Strategy<Value = (Catalog, RecommendationQuery)> {
    catalog().prop_flat_map(|c| {
        let conf = c.conferences().next().unwrap().product_id.clone();
        (Just(c), query(conf))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn results_respect_every_filter((c, q) in with_query()) {
        let got = query_scores(&c, &q).unwrap();
        prop_assert!(got.len() <= q.limit);
        for r in &got {
            let p = &c.products[&r.product_id];
            prop_assert!(q.kinds.contains(&p.kind));
            prop_assert!(p.year_range.0 <= q.to_year && p.year_range.1 >= q.from_year);
            if let Some(person) = &q.person {
                let needle = person.to_lowercase();
                prop_assert!(p.authors.iter().chain(&p.editors).any(|n| n.to_lowercase().contains(&needle)));
            }
        }
        prop_assert!(got.windows(2).all(|w| w[0].score >= w[1].score));
    }

    #[test]
    fn truncation_is_a_prefix((c, q) in with_query()) {
        let shorter = query_scores(&c, &q).unwrap();
        let longer = query_scores(&c, &RecommendationQuery { limit: q.limit + 1, ..q.clone() }).unwrap();
        prop_assert!(longer.starts_with(&shorter));
    }

    #[test]
    fn save_load_round_trip(c in catalog()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("catalog.sbr");
        save_catalog(&c, &path).unwrap();
        prop_assert_eq!(load_catalog(&path).unwrap(), c);
    }
}
