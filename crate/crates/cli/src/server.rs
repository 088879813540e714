//! HTTP front for annotation sessions.

use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use prisel_core::annotate::{AnnotateError, AnnotationService};
use serde::Deserialize;
use serde_json::json;
use tower_http::services::ServeDir;

type Shared = Arc<AnnotationService>;

pub struct ApiError(AnnotateError);

impl From<AnnotateError> for ApiError {
    fn from(e: AnnotateError) -> Self {
        Self(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        use AnnotateError::*;
        let (status, code) = match &self.0 {
            SessionNotFound(_) => (StatusCode::NOT_FOUND, "session_not_found"),
            SessionExpired => (StatusCode::GONE, "session_expired"),
            QueueEmpty => (StatusCode::NOT_FOUND, "queue_empty"),
            NoCurrentSample => (StatusCode::CONFLICT, "no_current_sample"),
            NotCurrent(_) => (StatusCode::CONFLICT, "not_current"),
            AlreadyComplete(_) => (StatusCode::CONFLICT, "already_complete"),
            DuplicateSelection(_) => (StatusCode::CONFLICT, "duplicate_selection"),
            IndexOutOfRange { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "index_out_of_range"),
            RationaleRequired => (StatusCode::UNPROCESSABLE_ENTITY, "rationale_required"),
            Io { .. } | InvalidQuota(_) => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        (
            status,
            Json(json!({ "error": code, "message": self.0.to_string() })),
        )
            .into_response()
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Deserialize)]
struct NewSession {
    annotator_id: String,
}

#[derive(Deserialize)]
struct SelectBody {
    #[serde(default)]
    sample_id: Option<String>,
    statement_index: usize,
    #[serde(default)]
    rationale: Option<String>,
}

#[derive(Deserialize)]
struct NoneBody {
    #[serde(default)]
    sample_id: Option<String>,
    confirmed: bool,
}

async fn create_session(State(svc): State<Shared>, Json(body): Json<NewSession>) -> Response {
    let annotator = body.annotator_id.trim();
    if annotator.is_empty() {
        return (
            StatusCode::BAD_REQUEST,
            Json(json!({ "error": "bad_request", "message": "annotator_id must not be empty" })),
        )
            .into_response();
    }
    let id = svc.start_session(annotator);
    (StatusCode::CREATED, Json(json!({ "session_id": id }))).into_response()
}

async fn current(
    State(svc): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<impl serde::Serialize> {
    Ok(Json(svc.current(&id)?))
}

fn sample_or_current(
    svc: &AnnotationService,
    session: &str,
    given: Option<String>,
) -> Result<String, AnnotateError> {
    match given {
        Some(s) => Ok(s),
        None => svc
            .in_progress(session)?
            .ok_or(AnnotateError::NoCurrentSample),
    }
}

async fn select(
    State(svc): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<SelectBody>,
) -> ApiResult<impl serde::Serialize> {
    let sample = sample_or_current(&svc, &id, body.sample_id)?;
    Ok(Json(svc.select(
        &id,
        &sample,
        body.statement_index,
        body.rationale,
    )?))
}

async fn none_relevant(
    State(svc): State<Shared>,
    Path(id): Path<String>,
    Json(body): Json<NoneBody>,
) -> ApiResult<impl serde::Serialize> {
    let sample = sample_or_current(&svc, &id, body.sample_id)?;
    Ok(Json(svc.none_relevant(&id, &sample, body.confirmed)?))
}

async fn progress(
    State(svc): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<impl serde::Serialize> {
    Ok(Json(svc.progress(&id)?))
}

pub fn router(svc: Shared, static_dir: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}/current", get(current))
        .route("/api/session/{id}/select", post(select))
        .route("/api/session/{id}/none", post(none_relevant))
        .route("/api/session/{id}/progress", get(progress))
        .with_state(svc);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until Ctrl-C.
pub async fn serve(svc: Shared, static_dir: Option<PathBuf>, addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(svc, static_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
