//! `sbr`: build a recommendation catalog from an ontology and chapter
//! metadata, query it, and serve it over HTTP.

mod commands;
mod error;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "sbr", version, about = "Conference-to-product recommendation over a topic ontology")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Load an ontology and report integrity problems and warnings.
    Validate {
        /// Ontology file (JSON Lines).
        ontology: PathBuf,
    },
    /// Annotate products, precompute similarities, and write a catalog.
    Build(BuildArgs),
    /// Print recommendations for one conference.
    Recommend {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = TableFormat::Table)]
        format: TableFormat,
    },
    /// Write recommendations as CSV or JSON.
    Export {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value_t = ExportArg::Csv)]
        format: ExportArg,
        /// Destination file; standard output when omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Serve the HTTP API until interrupted.
    Serve {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long, default_value = "127.0.0.1:8080")]
        bind: SocketAddr,
        /// Year the default publication window ends at (defaults to now).
        #[arg(long)]
        current_year: Option<i32>,
    },
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// JSON run manifest; relative paths inside it resolve against its directory.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long)]
    ontology: Option<PathBuf>,
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Last year of the conference window (defaults to the current year).
    #[arg(long)]
    reference_year: Option<i32>,
    #[arg(long)]
    jaccard_threshold: Option<f64>,
    #[arg(long)]
    cosine_threshold: Option<f64>,
    /// Persist pairs whose cosine equals the threshold exactly.
    #[arg(long)]
    inclusive_cosine: bool,
    /// Catalog file to write.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Maximum topics kept per product summary.
    #[arg(long)]
    budget: Option<usize>,
    /// Worker threads for annotation and scoring.
    #[arg(long, default_value_t = default_workers())]
    workers: usize,
    /// Also dump scores as TSV (six decimals).
    #[arg(long)]
    scores_tsv: Option<PathBuf>,
    /// Also dump per-product annotations as JSON Lines.
    #[arg(long)]
    annotations: Option<PathBuf>,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map(usize::from).unwrap_or(1)
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    catalog: PathBuf,
    /// Conference series id, e.g. `conf:iswc`.
    #[arg(long)]
    conference: String,
    /// Comma-separated subset of book, journal_year, conference_series.
    #[arg(long, value_delimiter = ',')]
    kinds: Vec<String>,
    #[arg(long)]
    from: Option<i32>,
    #[arg(long)]
    to: Option<i32>,
    #[arg(long)]
    limit: Option<usize>,
    /// Substring of an author or editor name.
    #[arg(long)]
    person: Option<String>,
    #[arg(long)]
    current_year: Option<i32>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TableFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportArg {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Validate { ontology } => commands::validate(&ontology),
        Command::Build(args) => commands::build(args),
        Command::Recommend { query, format } => commands::recommend(query, matches!(format, TableFormat::Json)),
        Command::Export { query, format, output } => {
            let format = match format {
                ExportArg::Csv => sbr_service::ExportFormat::Csv,
                ExportArg::Json => sbr_service::ExportFormat::Json,
            };
            commands::export(query, format, output.as_deref())
        }
        Command::Serve { catalog, bind, current_year } => commands::serve(&catalog, bind, current_year),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
