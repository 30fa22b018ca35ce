use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use sbr_core::store::StoreError;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("unknown conference `{0}`")]
    UnknownConference(String),
    #[error("unknown product `{0}`")]
    UnknownProduct(String),
    #[error("{0}")]
    InvalidQuery(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("no such endpoint")]
    NotFound,
    #[error("storage failure: {0}")]
    Storage(String),
}

impl ServiceError {
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::UnknownConference(_) => "unknown_conference",
            ServiceError::UnknownProduct(_) => "unknown_product",
            ServiceError::InvalidQuery(_) => "invalid_query",
            ServiceError::BadRequest(_) => "bad_request",
            ServiceError::NotFound => "not_found",
            ServiceError::Storage(_) => "storage_failure",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ServiceError::UnknownConference(_) | ServiceError::UnknownProduct(_) | ServiceError::NotFound => {
                StatusCode::NOT_FOUND
            }
            ServiceError::InvalidQuery(_) | ServiceError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ServiceError::Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<StoreError> for ServiceError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownConference(id) => ServiceError::UnknownConference(id),
            StoreError::UnknownProduct(id) => ServiceError::UnknownProduct(id),
            StoreError::InvalidQuery(m) => ServiceError::InvalidQuery(m),
            other => ServiceError::Storage(other.to_string()),
        }
    }
}

/// Body of every non-2xx response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let body = ErrorBody { code: self.code().to_owned(), message: self.to_string() };
        (self.status(), Json(body)).into_response()
    }
}
