#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use sbr_core::pipeline::{run, RunManifest};
use sbr_core::Catalog;
use sbr_service::{router, Service};
use tower::ServiceExt;

pub const FIXTURE_YEAR: i32 = 2018;

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/demo")
}

pub fn demo_catalog() -> Catalog {
    let dir = demo_dir();
    let manifest: RunManifest = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    run(&manifest.resolve_against(&dir), 2).unwrap().catalog
}

pub fn demo_service() -> Arc<Service> {
    Arc::new(Service::new(demo_catalog(), FIXTURE_YEAR).with_clock(|| 1_537_142_400))
}

pub async fn call(service: &Arc<Service>, req: Request<Body>) -> (StatusCode, Vec<u8>) {
    let response = router(service.clone()).oneshot(req).await.unwrap();
    let status = response.status();
    (status, response.into_body().collect().await.unwrap().to_bytes().to_vec())
}

pub async fn get(service: &Arc<Service>, uri: &str) -> (StatusCode, Vec<u8>) {
    call(service, Request::get(uri).body(Body::empty()).unwrap()).await
}

pub async fn get_json(service: &Arc<Service>, uri: &str) -> (StatusCode, serde_json::Value) {
    let (status, body) = get(service, uri).await;
    (status, serde_json::from_slice(&body).unwrap_or_else(|e| panic!("{uri}: {e}: {}", String::from_utf8_lossy(&body))))
}

pub async fn post_json(service: &Arc<Service>, uri: &str, body: &str) -> (StatusCode, serde_json::Value) {
    let req = Request::post(uri).header("content-type", "application/json").body(Body::from(body.to_owned())).unwrap();
    let (status, body) = call(service, req).await;
    (status, serde_json::from_slice(&body).unwrap())
}
