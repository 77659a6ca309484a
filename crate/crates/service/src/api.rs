use std::collections::BTreeMap;
use std::io;
use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, post};
use axum::{Json, Router};
use guifusion_core::{AppDatabase, ReportFormat, SimilarityConfig};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::store::{FinalizeRequest, StepRequest, Store};

type Shared = Arc<Store>;
type ApiResult<T> = Result<T, ServiceError>;

/// Parses a JSON body; an empty body reads as `null`.
fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    let text = if bytes.iter().all(u8::is_ascii_whitespace) {
        &b"null"[..]
    } else {
        &bytes[..]
    };
    serde_json::from_slice(text).map_err(|e| ServiceError::BadRequest(format!("invalid request body: {e}")))
}

#[derive(Deserialize)]
struct CreateSession {
    app_id: String,
    version: String,
}

#[derive(Deserialize, Default)]
struct ReplayRequest {
    #[serde(default)]
    version: Option<String>,
}

#[derive(Serialize)]
struct AppEntry {
    app_id: String,
    version: String,
}

#[derive(Serialize)]
struct TriageView {
    report_id: String,
    ranking: Vec<guifusion_core::maintenance::TriageEntry>,
}

async fn list_apps(State(store): State<Shared>) -> Json<Vec<AppEntry>> {
    Json(
        AppDatabase::list(store.root())
            .into_iter()
            .map(|(app_id, version)| AppEntry { app_id, version })
            .collect(),
    )
}

async fn create_session(State(store): State<Shared>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let req: CreateSession = body(&bytes)?;
    let session = store.create_session(&req.app_id, &req.version)?;
    Ok((StatusCode::CREATED, Json(session)))
}

async fn get_session(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.get_session(&id)?))
}

async fn abandon_session(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.abandon(&id)?))
}

async fn suggestions(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.get_suggestions(&id)?))
}

async fn submit_step(
    State(store): State<Shared>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<impl IntoResponse> {
    let req: StepRequest = body(&bytes)?;
    Ok(Json(store.submit_step(&id, req)?))
}

async fn undo_step(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(store.undo_last_step(&id)?))
}

async fn finalize(State(store): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let req: FinalizeRequest = body(&bytes)?;
    Ok((StatusCode::CREATED, Json(store.finalize(&id, req)?)))
}

async fn list_reports(State(store): State<Shared>) -> impl IntoResponse {
    Json(store.list_reports())
}

async fn get_report(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> ApiResult<Response> {
    let format = match q.get("format") {
        None => ReportFormat::Json,
        Some(f) => f.parse::<ReportFormat>().map_err(ServiceError::BadRequest)?,
    };
    let content_type = match format {
        ReportFormat::Json => "application/json",
        ReportFormat::Markdown => "text/markdown; charset=utf-8",
        ReportFormat::Html => "text/html; charset=utf-8",
    };
    let doc = store.render(&id, format)?;
    Ok(([(header::CONTENT_TYPE, content_type)], doc).into_response())
}

async fn replay(State(store): State<Shared>, Path(id): Path<String>, bytes: Bytes) -> ApiResult<impl IntoResponse> {
    let req: Option<ReplayRequest> = body(&bytes)?;
    let version = match req.unwrap_or_default().version {
        Some(v) => v,
        None => store.report(&id)?.app_version.clone(),
    };
    Ok(Json(store.replay(&id, &version)?))
}

async fn duplicates(
    State(store): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<BTreeMap<String, String>>,
) -> ApiResult<impl IntoResponse> {
    let mut cfg = SimilarityConfig::default();
    if let Some(tau) = q.get("tau") {
        cfg.tau = tau
            .parse()
            .map_err(|_| ServiceError::BadRequest(format!("tau must be a number, got `{tau}`")))?;
    }
    Ok(Json(store.duplicates_of(&id, &cfg)?))
}

async fn triage(State(store): State<Shared>, Path(id): Path<String>) -> ApiResult<impl IntoResponse> {
    let ranking = store.triage(&id)?;
    Ok(Json(TriageView { report_id: id, ranking }))
}

async fn screenshot(State(store): State<Shared>, Path(file): Path<String>) -> ApiResult<Response> {
    let Some(id) = file.strip_suffix(".svg") else {
        return Err(ServiceError::UnknownScreenshot(file));
    };
    let svg = store.screenshot(id)?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}

async fn not_found(method: axum::http::Method, uri: axum::http::Uri) -> ServiceError {
    ServiceError::UnknownEndpoint(format!("{method} {}", uri.path()))
}

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/api/apps", get(list_apps))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(get_session).delete(abandon_session))
        .route("/api/sessions/{id}/suggestions", get(suggestions))
        .route("/api/sessions/{id}/steps", post(submit_step))
        .route("/api/sessions/{id}/steps/last", delete(undo_step))
        .route("/api/sessions/{id}/finalize", post(finalize))
        .route("/api/reports", get(list_reports))
        .route("/api/reports/{id}", get(get_report))
        .route("/api/reports/{id}/replay", post(replay))
        .route("/api/reports/{id}/duplicates", get(duplicates))
        .route("/api/reports/{id}/triage", get(triage))
        .route("/api/screenshots/{file}", get(screenshot))
        .fallback(not_found)
        .with_state(store)
}

/// Binds `addr` and serves until Ctrl-C. Binding failures are returned
/// before anything is served.
pub async fn serve(store: Arc<Store>, addr: SocketAddr) -> io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(store))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
