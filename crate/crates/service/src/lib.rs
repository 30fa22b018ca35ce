//! Read-only query layer and HTTP API over a precomputed catalog.
//!
//! [`Service`] answers conference search, recommendation, comparison and
//! export queries against an in-memory [`sbr_core::Catalog`] snapshot and
//! funnels feedback through a single writer. [`router`] exposes it over HTTP.

mod error;
pub mod export;
mod http;
mod query;

pub use error::{ErrorBody, ServiceError};
pub use export::ExportFormat;
pub use http::router;
pub use query::{
    CompareMode, ComparisonEdge, ComparisonGraph, ComparisonNode, ConferenceHit, FeedbackRequest, Membership,
    PersonRole, RecommendationCard, Service, TopicWeight, AUTHOR_DISPLAY_LIMIT, TOPIC_CAP,
};
