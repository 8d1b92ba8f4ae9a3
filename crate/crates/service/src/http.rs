//! JSON-over-HTTP wire API.

use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, PathRejection};
use axum::extract::{FromRequest, FromRequestParts, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::Router;
use puzzlers_core::EditAction;
use puzzlers_llm::MODEL_REGISTRY;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::ServiceError;
use crate::service::{ConfigUpdate, RandomPuzzleRequest, SessionService};
use crate::session::{CheckSource, Mode};

/// Error response: `{"error": {"code": ..., "message": ...}}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: String,
    message: String,
}

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError {
            status: StatusCode::from_u16(e.status()).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(e: JsonRejection) -> Self {
        ApiError {
            status: e.status(),
            code: "invalid_request".into(),
            message: e.body_text(),
        }
    }
}

impl From<PathRejection> for ApiError {
    fn from(e: PathRejection) -> Self {
        ApiError {
            status: e.status(),
            code: "invalid_request".into(),
            message: e.body_text(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, axum::Json(body)).into_response()
    }
}

#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
struct Json<T>(T);

impl<T: Serialize> IntoResponse for Json<T> {
    fn into_response(self) -> Response {
        axum::Json(self.0).into_response()
    }
}

#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Path), rejection(ApiError))]
struct Path<T>(T);

type ApiResult<T> = Result<Json<T>, ApiError>;
type AppState = State<Arc<SessionService>>;

#[derive(Deserialize)]
struct CreateSession {
    puzzle_id: String,
    #[serde(default)]
    test_index: usize,
}

#[derive(Deserialize)]
struct ModeBody {
    mode: Mode,
}

#[derive(Deserialize)]
struct CheckBody {
    source: CheckSource,
}

#[derive(Deserialize)]
struct HintBody {
    hint: String,
}

#[derive(Serialize)]
struct Explanation {
    explanation: String,
}

/// Runs a blocking provider call off the async executor.
async fn blocking<T, F>(f: F) -> Result<T, ApiError>
where
    F: FnOnce() -> Result<T, ServiceError> + Send + 'static,
    T: Send + 'static,
{
    tokio::task::spawn_blocking(f).await.map_err(|e| ApiError {
        status: StatusCode::INTERNAL_SERVER_ERROR,
        code: "internal".into(),
        message: e.to_string(),
    })?
    .map_err(ApiError::from)
}

pub fn router(service: Arc<SessionService>) -> Router {
    Router::new()
        .route("/models", get(list_models))
        .route("/puzzles", get(list_puzzles))
        .route("/puzzles/random", post(add_random_puzzle))
        .route("/puzzles/{id}", get(get_puzzle))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/mode", post(switch_mode))
        .route("/sessions/{id}/edit", post(apply_edit))
        .route("/sessions/{id}/check", post(check))
        .route("/sessions/{id}/ai/solve", post(ai_solve))
        .route("/sessions/{id}/ai/explain", post(ai_explain))
        .route("/sessions/{id}/hint", put(set_hint))
        .route("/sessions/{id}/config", put(set_config))
        .route("/sessions/{id}/events", get(read_events))
        .fallback(|| async {
            ApiError {
                status: StatusCode::NOT_FOUND,
                code: "not_found".into(),
                message: "no such endpoint".into(),
            }
        })
        .with_state(service)
}

async fn list_models() -> impl IntoResponse {
    Json(MODEL_REGISTRY)
}

async fn list_puzzles(State(svc): AppState) -> impl IntoResponse {
    Json(svc.list_puzzles())
}

async fn get_puzzle(State(svc): AppState, Path(id): Path<String>) -> ApiResult<impl Serialize> {
    Ok(Json(svc.get_puzzle(&id)?))
}

async fn add_random_puzzle(
    State(svc): AppState,
    Json(body): Json<RandomPuzzleRequest>,
) -> Result<impl IntoResponse, ApiError> {
    let puzzle = svc.add_random_puzzle(&body)?;
    Ok((StatusCode::CREATED, Json(puzzle)))
}

async fn create_session(
    State(svc): AppState,
    Json(body): Json<CreateSession>,
) -> Result<impl IntoResponse, ApiError> {
    let session = svc.create_session(&body.puzzle_id, body.test_index)?;
    Ok((StatusCode::CREATED, Json(session)))
}

async fn get_session(State(svc): AppState, Path(id): Path<String>) -> ApiResult<impl Serialize> {
    Ok(Json(svc.get_session(&id)?))
}

async fn switch_mode(
    State(svc): AppState,
    Path(id): Path<String>,
    Json(body): Json<ModeBody>,
) -> ApiResult<impl Serialize> {
    Ok(Json(svc.switch_mode(&id, body.mode)?))
}

async fn apply_edit(
    State(svc): AppState,
    Path(id): Path<String>,
    Json(action): Json<EditAction>,
) -> ApiResult<impl Serialize> {
    Ok(Json(svc.apply_edit(&id, action)?))
}

async fn check(
    State(svc): AppState,
    Path(id): Path<String>,
    Json(body): Json<CheckBody>,
) -> ApiResult<impl Serialize> {
    Ok(Json(svc.check(&id, body.source)?))
}

async fn ai_solve(State(svc): AppState, Path(id): Path<String>) -> ApiResult<impl Serialize> {
    let attempt = blocking(move || svc.ai_solve(&id)).await?;
    Ok(Json(attempt))
}

async fn ai_explain(State(svc): AppState, Path(id): Path<String>) -> ApiResult<impl Serialize> {
    let explanation = blocking(move || svc.ai_explain(&id)).await?;
    Ok(Json(Explanation { explanation }))
}

async fn set_hint(
    State(svc): AppState,
    Path(id): Path<String>,
    Json(body): Json<HintBody>,
) -> ApiResult<impl Serialize> {
    Ok(Json(svc.set_hint(&id, &body.hint)?))
}

async fn set_config(
    State(svc): AppState,
    Path(id): Path<String>,
    Json(body): Json<ConfigUpdate>,
) -> ApiResult<impl Serialize> {
    Ok(Json(svc.set_config(&id, body)?))
}

async fn read_events(State(svc): AppState, Path(id): Path<String>) -> ApiResult<impl Serialize> {
    Ok(Json(svc.read_events(&id)?))
}
