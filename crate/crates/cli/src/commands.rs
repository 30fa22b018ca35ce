use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::Datelike;
use sbr_core::corpus::ProductKind;
use sbr_core::pipeline::{load_graph, run, RunManifest};
use sbr_core::simeng::{write_tsv, SimEngConfig};
use sbr_core::store::{
    feedback_path, load_catalog, read_feedback, save_catalog, Catalog, FeedbackLog, RecommendationQuery,
};
use sbr_service::{export::render, router, ExportFormat, RecommendationCard, Service};

use crate::error::CliError;
use crate::{BuildArgs, QueryArgs};

pub fn validate(ontology: &Path) -> Result<(), CliError> {
    let graph = load_graph(ontology)?;
    let report = graph.validate();
    println!("{}: {} topics, {} edges, {} classes", ontology.display(), graph.len(), graph.edges().len(), graph.classes().count());
    println!("{report}");
    Ok(())
}

fn manifest_from(args: &BuildArgs) -> Result<RunManifest, CliError> {
    let mut manifest = match &args.manifest {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| CliError::io(path.display(), e))?;
            let bad = |e: serde_json::Error| CliError::Data(format!("{}: {e}", path.display()));
            let mut raw: serde_json::Value = serde_json::from_slice(&bytes).map_err(bad)?;
            if let Some(fields) = raw.as_object_mut() {
                fields.entry("reference_year").or_insert_with(|| this_year().into());
            }
            let m: RunManifest = serde_json::from_value(raw).map_err(bad)?;
            m.resolve_against(path.parent().unwrap_or(Path::new(".")))
        }
        None => {
            let missing = |flag: &str| CliError::Usage(format!("--{flag} is required without --manifest"));
            RunManifest {
                ontology: args.ontology.clone().ok_or_else(|| missing("ontology"))?,
                metadata: args.metadata.clone().ok_or_else(|| missing("metadata"))?,
                reference_year: this_year(),
                similarity: SimEngConfig::default(),
                output: args.output.clone().ok_or_else(|| missing("output"))?,
                budget: sbr_core::annotator::DEFAULT_REDUCTION_BUDGET,
            }
        }
    };
    if let Some(p) = &args.ontology {
        manifest.ontology = p.clone();
    }
    if let Some(p) = &args.metadata {
        manifest.metadata = p.clone();
    }
    if let Some(y) = args.reference_year {
        manifest.reference_year = y;
    }
    if let Some(p) = &args.output {
        manifest.output = p.clone();
    }
    if let Some(j) = args.jaccard_threshold {
        manifest.similarity.jaccard_threshold = j;
    }
    if let Some(c) = args.cosine_threshold {
        manifest.similarity.cosine_threshold = c;
    }
    if args.inclusive_cosine {
        manifest.similarity.inclusive_cosine = true;
    }
    if let Some(b) = args.budget {
        manifest.budget = b;
    }
    if manifest.budget == 0 {
        return Err(CliError::Usage("budget must be at least 1".into()));
    }
    manifest.similarity.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(manifest)
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path.display(), e))
}

/// Feedback from a previous catalog at the same path, minus records whose
/// products no longer exist.
fn carry_over_feedback(catalog: &mut Catalog, output: &Path) -> Result<usize, CliError> {
    let path = feedback_path(output);
    let file = match File::open(&path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
        Err(e) => return Err(CliError::io(path.display(), e)),
    };
    let previous = read_feedback(BufReader::new(file))?;
    let before = previous.len();
    catalog.feedback = previous
        .into_iter()
        .filter(|f| catalog.conference(&f.conference_id).is_ok() && catalog.products.contains_key(&f.product_id))
        .collect();
    Ok(before - catalog.feedback.len())
}

pub fn build(args: BuildArgs) -> Result<(), CliError> {
    let manifest = manifest_from(&args)?;
    let mut out = run(&manifest, args.workers)?;

    for d in &out.report.ingest_diagnostics {
        eprintln!("metadata line {}: {}", d.line, d.message);
    }
    if out.ontology_report.warning_count() > 0 {
        eprintln!("{}", out.ontology_report);
    }
    for id in &out.report.empty_products {
        eprintln!("warning: no topics detected for {id}; it cannot be recommended");
    }
    for w in &out.report.warnings {
        eprintln!("warning: {w}");
    }

    let dropped = carry_over_feedback(&mut out.catalog, &manifest.output)?;
    if dropped > 0 {
        eprintln!("warning: dropped {dropped} feedback records for products no longer in the catalog");
    }
    save_catalog(&out.catalog, &manifest.output)?;

    if let Some(path) = &args.scores_tsv {
        let mut w = create(path)?;
        let records: Vec<_> = out.catalog.scores.values().flatten().cloned().collect();
        write_tsv(&records, &mut w).and_then(|_| w.flush()).map_err(|e| CliError::io(path.display(), e))?;
    }
    if let Some(path) = &args.annotations {
        let mut w = create(path)?;
        for a in &out.annotations {
            serde_json::to_writer(&mut w, a).map_err(|e| CliError::Data(e.to_string()))?;
            writeln!(w).map_err(|e| CliError::io(path.display(), e))?;
        }
        w.flush().map_err(|e| CliError::io(path.display(), e))?;
    }

    println!("{}", out.report.prune);
    println!(
        "wrote {} ({} products, {} scores, {} feedback records)",
        manifest.output.display(),
        out.catalog.products.len(),
        out.catalog.record_count(),
        out.catalog.feedback.len()
    );
    Ok(())
}

fn this_year() -> i32 {
    chrono::Utc::now().year()
}

fn open_service(catalog: &Path, current_year: Option<i32>) -> Result<Service, CliError> {
    Ok(Service::new(load_catalog(catalog)?, current_year.unwrap_or_else(this_year)))
}

fn query_from(args: &QueryArgs, service: &Service) -> Result<RecommendationQuery, CliError> {
    let mut q = service.default_query(args.conference.clone());
    if !args.kinds.is_empty() {
        q.kinds = args
            .kinds
            .iter()
            .map(|k| k.parse::<ProductKind>().map_err(CliError::Usage))
            .collect::<Result<BTreeSet<_>, _>>()?;
    }
    if let Some(y) = args.from {
        q.from_year = y;
    }
    if let Some(y) = args.to {
        q.to_year = y;
    }
    if let Some(n) = args.limit {
        q.limit = n;
    }
    q.person = args.person.clone();
    q.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(q)
}

fn cards(args: &QueryArgs) -> Result<Vec<RecommendationCard>, CliError> {
    let service = open_service(&args.catalog, args.current_year)?;
    let q = query_from(args, &service)?;
    Ok(service.recommend(&q)?)
}

pub fn recommend(args: QueryArgs, json: bool) -> Result<(), CliError> {
    let cards = cards(&args)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let written = if json {
        serde_json::to_writer_pretty(&mut out, &cards).map_err(std::io::Error::from).and_then(|_| writeln!(out))
    } else {
        print_table(&mut out, &cards)
    };
    written.map_err(|e| CliError::io("stdout", e))
}

fn print_table(out: &mut impl Write, cards: &[RecommendationCard]) -> std::io::Result<()> {
    writeln!(out, "{:>4}  {:>8}  {:<17}  {:<9}  title", "rank", "score", "kind", "years")?;
    for (i, c) in cards.iter().enumerate() {
        let years = if c.year_min == c.year_max { c.year_min.to_string() } else { format!("{}-{}", c.year_min, c.year_max) };
        writeln!(out, "{:>4}  {:>8.6}  {:<17}  {:<9}  {}", i + 1, c.score, c.kind.as_str(), years, c.title)?;
        writeln!(out, "{:>4}  {:>8}  {}", "", "", c.link)?;
    }
    Ok(())
}

pub fn export(args: QueryArgs, format: ExportFormat, output: Option<&Path>) -> Result<(), CliError> {
    let bytes = render(&cards(&args)?, format)?;
    match output {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path.display(), e)),
        None => std::io::stdout().write_all(&bytes).map_err(|e| CliError::io("stdout", e)),
    }
}

pub fn serve(catalog: &Path, bind: SocketAddr, current_year: Option<i32>) -> Result<(), CliError> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .with_ansi(false)
        .init();

    let log_path: PathBuf = feedback_path(catalog);
    let service = open_service(catalog, current_year)?;
    let log = FeedbackLog::open(&log_path)?;
    let service = Arc::new(service.with_feedback_log(log));

    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::io("runtime", e))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(bind).await.map_err(|e| CliError::io(bind, e))?;
        let addr = listener.local_addr().map_err(|e| CliError::io(bind, e))?;
        tracing::info!(%addr, catalog = %catalog.display(), "listening");
        axum::serve(listener, router(service))
            .with_graceful_shutdown(shutdown_signal())
            .await
            .map_err(|e| CliError::io("server", e))?;
        tracing::info!("shut down");
        Ok(())
    })
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let terminate = async {
        match tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate()) {
            Ok(mut s) => {
                s.recv().await;
            }
            Err(_) => std::future::pending().await,
        }
    };
    #[cfg(not(unix))]
    let terminate = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = terminate => {},
    }
}
