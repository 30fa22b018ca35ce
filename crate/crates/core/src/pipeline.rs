//! Batch build: ontology + chapter metadata -> catalog.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annotator::{
    annotate_product, infer_pmcs, reduce_topics, AnnotationRecord, LabelMatcher, DEFAULT_REDUCTION_BUDGET,
};
use crate::corpus::{group_products, ingest_metadata, ChapterRecord, CorpusError, Diagnostic, ProductKind};
use crate::ontology::{load_ontology, OntologyError, OntologyGraph, ValidationReport};
use crate::simeng::{precompute_with_workers, PruneStats, SimEngConfig, SimEngError, TopicVector};
use crate::store::{Catalog, ProductSummary, StoreError, TopicInfo};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("ontology: {0}")]
    Ontology(#[from] OntologyError),
    #[error("metadata: {0}")]
    Metadata(#[from] CorpusError),
    #[error("similarity: {0}")]
    Similarity(#[from] SimEngError),
    #[error("catalog: {0}")]
    Store(#[from] StoreError),
}

fn default_budget() -> usize {
    DEFAULT_REDUCTION_BUDGET
}

/// Inputs of one batch run. Relative paths are resolved by the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub ontology: PathBuf,
    pub metadata: PathBuf,
    pub reference_year: i32,
    #[serde(flatten)]
    pub similarity: SimEngConfig,
    pub output: PathBuf,
    #[serde(default = "default_budget")]
    pub budget: usize,
}

impl RunManifest {
    pub fn resolve_against(mut self, base: &Path) -> Self {
        for p in [&mut self.ontology, &mut self.metadata, &mut self.output] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildSettings {
    pub reference_year: i32,
    pub similarity: SimEngConfig,
    pub budget: usize,
    pub workers: usize,
}

impl BuildSettings {
    pub fn from_manifest(m: &RunManifest, workers: usize) -> Self {
        BuildSettings { reference_year: m.reference_year, similarity: m.similarity, budget: m.budget, workers }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunReport {
    pub ingest_diagnostics: Vec<Diagnostic>,
    /// Products with no detected topics; they can never be recommended.
    pub empty_products: Vec<String>,
    pub warnings: Vec<String>,
    pub prune: PruneStats,
}

#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub catalog: Catalog,
    pub annotations: Vec<AnnotationRecord>,
    pub report: RunReport,
    pub ontology_report: ValidationReport,
}

fn open(path: &Path) -> Result<BufReader<File>, PipelineError> {
    File::open(path).map(BufReader::new).map_err(|source| PipelineError::Io { path: path.to_owned(), source })
}

pub fn load_graph(path: &Path) -> Result<OntologyGraph, PipelineError> {
    Ok(load_ontology(open(path)?)?)
}

/// Read both inputs named in the manifest and build the catalog.
pub fn run(manifest: &RunManifest, workers: usize) -> Result<BuildOutput, PipelineError> {
    let graph = load_graph(&manifest.ontology)?;
    let ingest = ingest_metadata(open(&manifest.metadata)?)?;
    let mut out = build(&graph, &ingest.records, &BuildSettings::from_manifest(manifest, workers))?;
    out.report.ingest_diagnostics = ingest.diagnostics;
    Ok(out)
}

/// Group, annotate, and score. Output is independent of `workers`.
pub fn build(graph: &OntologyGraph, chapters: &[ChapterRecord], settings: &BuildSettings) -> Result<BuildOutput, PipelineError> {
    settings.similarity.validate()?;
    let products = group_products(chapters, settings.reference_year);
    let matcher = LabelMatcher::build(graph);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.workers.max(1))
        .build()
        .map_err(|e| SimEngError::Config(format!("cannot start worker pool: {e}")))?;
    let annotated: Vec<_> = pool.install(|| {
        products
            .par_iter()
            .map(|p| {
                let dist = annotate_product(&matcher, graph, p);
                let reduced = reduce_topics(&dist, settings.budget);
                let pmc = infer_pmcs(graph, &dist);
                (dist, reduced, pmc)
            })
            .collect()
    });

    let mut report = RunReport::default();
    let mut summaries = BTreeMap::new();
    let mut annotations = Vec::with_capacity(products.len());
    let mut conferences = Vec::new();
    let mut vectors = Vec::with_capacity(products.len());
    for (p, (dist, reduced, pmc)) in products.iter().zip(annotated) {
        if dist.is_empty() {
            report.empty_products.push(p.product_id.clone());
        }
        let vector = TopicVector::from_distribution(&dist);
        if p.kind == ProductKind::ConferenceSeries {
            conferences.push(vector.clone());
        }
        vectors.push(vector);
        annotations.push(AnnotationRecord {
            product_id: p.product_id.clone(),
            weights: dist.weights.clone(),
            reduced: reduced.clone(),
            pmc: pmc.clone(),
        });
        summaries.insert(
            p.product_id.clone(),
            ProductSummary {
                product_id: p.product_id.clone(),
                kind: p.kind,
                title: p.display_title.clone(),
                year_range: p.year_range,
                doi: p.doi.clone(),
                acronym: p.acronym.clone(),
                authors: p.authors.clone(),
                editors: p.editors.clone(),
                chapter_count: p.chapters.len() as u32,
                reduced,
                weights: dist.weights,
                pmc,
            },
        );
    }
    if conferences.is_empty() {
        report.warnings.push("no conference series in the reference window; score table is empty".into());
    }

    let (records, prune) = precompute_with_workers(&conferences, &vectors, &settings.similarity, settings.workers)?;
    report.prune = prune;

    let catalog = Catalog::new(summaries, topic_table(graph), records)?;
    Ok(BuildOutput { catalog, annotations, report, ontology_report: graph.validate() })
}

/// Label and direct parents of every canonical topic.
fn topic_table(graph: &OntologyGraph) -> BTreeMap<crate::ontology::TopicId, TopicInfo> {
    graph
        .classes()
        .map(|(rep, _)| {
            let topic = graph.topic(rep.as_str()).expect("representative exists");
            let broader = graph.parents(rep.as_str()).expect("representative exists").into_iter().collect();
            (rep.clone(), TopicInfo { label: topic.label.clone(), broader })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_defaults_and_resolution() {
        let m: RunManifest = serde_json::from_str(
            r#"{"ontology":"o.jsonl","metadata":"/abs/m.jsonl","reference_year":2018,"output":"c.sbr"}"#,
        )
        .unwrap();
        assert_eq!(m.similarity, SimEngConfig::default());
        assert_eq!(m.budget, 15);
        let m = m.resolve_against(Path::new("/base"));
        assert_eq!(m.ontology, Path::new("/base/o.jsonl"));
        assert_eq!(m.metadata, Path::new("/abs/m.jsonl"));
    }

    #[test]
    fn empty_corpus_warns() {
        let graph = load_ontology(r#"{"rec":"topic","id":"a","label":"A"}"#.as_bytes()).unwrap();
        let settings = BuildSettings { reference_year: 2018, similarity: SimEngConfig::default(), budget: 15, workers: 1 };
        let out = build(&graph, &[], &settings).unwrap();
        assert_eq!(out.catalog.record_count(), 0);
        assert_eq!(out.report.warnings.len(), 1);
        assert_eq!(out.catalog.topics.len(), 1);
    }
}
