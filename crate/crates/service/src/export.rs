use crate::error::ServiceError;
use crate::query::RecommendationCard;

pub const CSV_HEADER: [&str; 7] = ["title", "kind", "year_min", "year_max", "score", "link", "topics"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl ExportFormat {
    pub fn content_type(self) -> &'static str {
        match self {
            ExportFormat::Csv => "text/csv; charset=utf-8",
            ExportFormat::Json => "application/json",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ExportFormat::Csv => "csv",
            ExportFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown export format `{other}` (expected csv or json)")),
        }
    }
}

/// RFC 4180 CSV with CRLF line endings; topics as `label:weight;...`.
pub fn to_csv(cards: &[RecommendationCard]) -> Result<Vec<u8>, ServiceError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    let failed = |e: csv::Error| ServiceError::Storage(e.to_string());
    w.write_record(CSV_HEADER).map_err(failed)?;
    for c in cards {
        let topics: Vec<String> = c.top_topics.iter().map(|t| format!("{}:{}", t.label, t.weight)).collect();
        w.write_record([
            c.title.clone(),
            c.kind.to_string(),
            c.year_min.to_string(),
            c.year_max.to_string(),
            c.score.to_string(),
            c.link.clone(),
            topics.join(";"),
        ])
        .map_err(failed)?;
    }
    w.into_inner().map_err(|e| ServiceError::Storage(e.to_string()))
}

pub fn to_json(cards: &[RecommendationCard]) -> Result<Vec<u8>, ServiceError> {
    serde_json::to_vec_pretty(cards).map_err(|e| ServiceError::Storage(e.to_string()))
}

pub fn render(cards: &[RecommendationCard], format: ExportFormat) -> Result<Vec<u8>, ServiceError> {
    match format {
        ExportFormat::Csv => to_csv(cards),
        ExportFormat::Json => to_json(cards),
    }
}
