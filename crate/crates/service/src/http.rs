use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Path, Query, Request, State};
use axum::http::header;
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use sbr_core::corpus::ProductKind;
use sbr_core::store::{FeedbackRecord, RecommendationQuery};
use serde::Deserialize;

use crate::error::ServiceError;
use crate::export::{render, ExportFormat};
use crate::query::{
    CompareMode, ComparisonGraph, ConferenceHit, FeedbackRequest, RecommendationCard, Service, TopicWeight,
};

pub fn router(service: Arc<Service>) -> Router {
    Router::new()
        .route("/conferences", get(conferences))
        .route("/conferences/{id}/topics", get(topics))
        .route("/recommendations", get(recommendations))
        .route("/compare", get(compare))
        .route("/export", get(export))
        .route("/feedback", post(feedback))
        .fallback(|| async { ServiceError::NotFound })
        .layer(middleware::from_fn(log_request))
        .with_state(service)
}

async fn log_request(req: Request, next: Next) -> Response {
    let started = Instant::now();
    let method = req.method().clone();
    let uri = req.uri().clone();
    let response = next.run(req).await;
    tracing::info!(
        %method,
        %uri,
        status = response.status().as_u16(),
        micros = started.elapsed().as_micros() as u64,
        "request"
    );
    response
}

type Params<T> = Result<Query<T>, QueryRejection>;

fn params<T>(p: Params<T>) -> Result<T, ServiceError> {
    p.map(|Query(v)| v).map_err(|e| ServiceError::BadRequest(e.body_text()))
}

#[derive(Debug, Default, Deserialize)]
struct SearchParams {
    #[serde(default)]
    q: String,
}

async fn conferences(State(s): State<Arc<Service>>, p: Params<SearchParams>) -> Result<Json<Vec<ConferenceHit>>, ServiceError> {
    Ok(Json(s.search_conferences(&params(p)?.q)))
}

async fn topics(State(s): State<Arc<Service>>, Path(id): Path<String>) -> Result<Json<Vec<TopicWeight>>, ServiceError> {
    Ok(Json(s.conference_topics(&id)?))
}

/// Raw recommendation filters. Everything arrives as text so malformed
/// values produce the standard error body.
#[derive(Debug, Default, Deserialize)]
struct RecommendParams {
    conference: Option<String>,
    kinds: Option<String>,
    from: Option<String>,
    to: Option<String>,
    limit: Option<String>,
    person: Option<String>,
    format: Option<String>,
}

fn parse_number<T: std::str::FromStr>(name: &str, raw: &Option<String>) -> Result<Option<T>, ServiceError> {
    raw.as_deref()
        .filter(|v| !v.trim().is_empty())
        .map(|v| v.trim().parse().map_err(|_| ServiceError::InvalidQuery(format!("`{name}` must be an integer, got `{v}`"))))
        .transpose()
}

impl RecommendParams {
    fn into_query(self, service: &Service) -> Result<RecommendationQuery, ServiceError> {
        let conference = self
            .conference
            .filter(|c| !c.trim().is_empty())
            .ok_or_else(|| ServiceError::InvalidQuery("`conference` is required".into()))?;
        let mut q = service.default_query(conference);
        if let Some(kinds) = self.kinds.as_deref().filter(|k| !k.trim().is_empty()) {
            q.kinds = kinds
                .split(',')
                .map(|k| k.parse::<ProductKind>().map_err(ServiceError::InvalidQuery))
                .collect::<Result<BTreeSet<_>, _>>()?;
        }
        if let Some(from) = parse_number("from", &self.from)? {
            q.from_year = from;
        }
        if let Some(to) = parse_number("to", &self.to)? {
            q.to_year = to;
        }
        if let Some(limit) = parse_number("limit", &self.limit)? {
            q.limit = limit;
        }
        q.person = self.person.filter(|p| !p.trim().is_empty());
        q.validate()?;
        Ok(q)
    }
}

async fn recommendations(
    State(s): State<Arc<Service>>,
    p: Params<RecommendParams>,
) -> Result<Json<Vec<RecommendationCard>>, ServiceError> {
    let q = params(p)?.into_query(&s)?;
    Ok(Json(s.recommend(&q)?))
}

async fn export(State(s): State<Arc<Service>>, p: Params<RecommendParams>) -> Result<Response, ServiceError> {
    let mut raw = params(p)?;
    let format: ExportFormat = raw.format.take().as_deref().unwrap_or("csv").parse().map_err(ServiceError::InvalidQuery)?;
    let q = raw.into_query(&s)?;
    let body = render(&s.recommend(&q)?, format)?;
    let disposition = format!("attachment; filename=\"recommendations.{}\"", format.extension());
    Ok(([(header::CONTENT_TYPE, format.content_type().to_owned()), (header::CONTENT_DISPOSITION, disposition)], body)
        .into_response())
}

#[derive(Debug, Default, Deserialize)]
struct CompareParams {
    conference: Option<String>,
    product: Option<String>,
    mode: Option<String>,
    min_weight: Option<String>,
}

async fn compare(State(s): State<Arc<Service>>, p: Params<CompareParams>) -> Result<Json<ComparisonGraph>, ServiceError> {
    let p = params(p)?;
    let required = |v: Option<String>, name: &str| {
        v.filter(|v| !v.trim().is_empty()).ok_or_else(|| ServiceError::InvalidQuery(format!("`{name}` is required")))
    };
    let conference = required(p.conference, "conference")?;
    let product = required(p.product, "product")?;
    let mode: CompareMode = p.mode.as_deref().unwrap_or("all").parse().map_err(ServiceError::InvalidQuery)?;
    let min_weight = parse_number("min_weight", &p.min_weight)?.unwrap_or(0);
    Ok(Json(s.compare(&conference, &product, mode, min_weight)?))
}

async fn feedback(
    State(s): State<Arc<Service>>,
    body: Result<Json<FeedbackRequest>, JsonRejection>,
) -> Result<Json<FeedbackRecord>, ServiceError> {
    let Json(req) = body.map_err(|e| ServiceError::BadRequest(e.body_text()))?;
    Ok(Json(s.submit_feedback(req)?))
}
