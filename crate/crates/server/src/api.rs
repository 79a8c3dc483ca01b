//! REST routes. Every response body, errors included, is JSON.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{DefaultBodyLimit, Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use kbide_core::editor::{classify, completions, reindent, replace_symbols, SymbolMap};
use kbide_core::engine::{self, Context, EngineError, Propagation};
use kbide_core::language::tokenize;
use kbide_core::limits::{Deadline, Interrupt};
use kbide_core::share::ShareError;
use kbide_core::{check_files, Diagnostic, SourceFile};
use serde::Deserialize;
use serde_json::{json, Value};
use tower_http::services::ServeDir;

use crate::config::Mode;
use crate::state::AppState;
use crate::tutorials;
use crate::workspace::{FsError, WorkspacePath};
use crate::ws;

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    pub fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn with(mut self, key: &str, value: Value) -> Self {
        self.body[key] = value;
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::new(r.status(), r.body_text())
    }
}

impl From<QueryRejection> for ApiError {
    fn from(r: QueryRejection) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, r.body_text())
    }
}

impl From<FsError> for ApiError {
    fn from(e: FsError) -> Self {
        let status = match &e {
            FsError::NotFound(_) => StatusCode::NOT_FOUND,
            FsError::Escapes(_) => StatusCode::BAD_REQUEST,
            FsError::NotText(_) => StatusCode::UNPROCESSABLE_ENTITY,
            FsError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl From<ShareError> for ApiError {
    fn from(e: ShareError) -> Self {
        let status = match &e {
            ShareError::Empty => StatusCode::BAD_REQUEST,
            ShareError::TooLarge { .. } => StatusCode::PAYLOAD_TOO_LARGE,
            ShareError::NotFound(_) => StatusCode::NOT_FOUND,
            ShareError::Upstream(_) => StatusCode::BAD_GATEWAY,
            ShareError::Corrupt { .. } | ShareError::Io(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let upstream = matches!(e, ShareError::Upstream(_));
        let err = ApiError::new(status, e.to_string());
        if upstream {
            err.with("upstream", json!(true))
        } else {
            err
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/files", get(list_files))
        .route("/file", get(read_file).put(write_file))
        .route("/check", post(check))
        .route("/inference", post(inference))
        .route("/tutorials", get(list_tutorials))
        .route("/tutorials/{id}", get(get_tutorial))
        .route("/share", post(create_share))
        .route("/share/{id}", get(fetch_share))
        .route("/editor/highlight", post(highlight))
        .route("/editor/complete", post(complete))
        .route("/editor/reindent", post(reindent_text))
        .route("/editor/display", post(display_symbols))
        .fallback(api_not_found);
    let app = Router::new()
        .nest("/api", api)
        .route("/ws/session", get(ws::upgrade))
        .layer(DefaultBodyLimit::max(state.config.max_body_bytes));
    let app = match &state.config.static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app.route("/", get(index)),
    };
    app.with_state(state)
}

async fn api_not_found() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "no such route")
}

async fn index() -> Html<&'static str> {
    Html(include_str!("index.html"))
}

fn file_path(raw: &str) -> ApiResult<WorkspacePath> {
    WorkspacePath::parse(raw).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))
}

/// Run blocking work off the async threads.
async fn blocking<T: Send + 'static>(f: impl FnOnce() -> T + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))
}

async fn list_files(State(state): State<Arc<AppState>>) -> ApiResult<Json<Value>> {
    let files = blocking(move || state.fs.list()).await??;
    Ok(Json(json!({ "files": files })))
}

#[derive(Deserialize)]
struct FileQuery {
    path: String,
}

async fn read_file(
    State(state): State<Arc<AppState>>,
    query: Result<Query<FileQuery>, QueryRejection>,
) -> ApiResult<Json<Value>> {
    let Query(q) = query?;
    let path = file_path(&q.path)?;
    let content = blocking(move || state.fs.read(&path)).await??;
    Ok(Json(json!({ "path": q.path, "content": content })))
}

#[derive(Deserialize)]
struct WriteRequest {
    path: String,
    content: String,
}

async fn write_file(
    State(state): State<Arc<AppState>>,
    body: Result<Json<WriteRequest>, JsonRejection>,
) -> ApiResult<StatusCode> {
    // refuse before looking at the request at all
    if state.config.mode == Mode::Online {
        return Err(ApiError::new(
            StatusCode::FORBIDDEN,
            "the workspace is read-only in online mode",
        ));
    }
    let Json(req) = body?;
    let path = file_path(&req.path)?;
    blocking(move || state.fs.write(&path, &req.content)).await??;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Deserialize)]
struct CheckRequest {
    files: Vec<SourceFile>,
}

fn run_check(files: &[SourceFile]) -> (Option<kbide_core::language::TypedProgram>, Vec<Diagnostic>) {
    check_files(files.iter().map(|f| (f.name.as_str(), f.content.as_str())))
}

async fn check(body: Result<Json<CheckRequest>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let (_, diagnostics) = blocking(move || run_check(&req.files)).await?;
    Ok(Json(json!({ "diagnostics": diagnostics })))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InferenceKind {
    Modelexpand,
    Propagate,
    Unsatcore,
}

#[derive(Deserialize)]
struct InferenceRequest {
    files: Vec<SourceFile>,
    kind: InferenceKind,
    theory: String,
    structure: String,
    max_models: Option<u64>,
}

async fn inference(
    State(state): State<Arc<AppState>>,
    body: Result<Json<InferenceRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let limits = state.config.limits;
    blocking(move || {
        let (program, diagnostics) = run_check(&req.files);
        let Some(program) = program else {
            return Err(
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "the program has errors")
                    .with("diagnostics", json!(diagnostics)),
            );
        };
        let (theory, structure) = engine::lookup(&program, &req.theory, &req.structure)
            .map_err(|e| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()))?;
        let deadline = Instant::now()
            .checked_add(Duration::from_millis(limits.wall_ms))
            .map(Deadline);
        let ctx = Context::new(limits.engine(), deadline.as_ref().map(|d| d as &dyn Interrupt));
        let engine_err = |e: EngineError| match e {
            EngineError::Limit(kind) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()).with("limit", json!(kind))
            }
            e => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        };
        Ok(Json(match req.kind {
            InferenceKind::Modelexpand => {
                let n = req
                    .max_models
                    .unwrap_or(limits.max_models)
                    .min(limits.max_models)
                    .max(1);
                let n = usize::try_from(n).unwrap_or(usize::MAX);
                let models = engine::modelexpand(theory, structure, n, &ctx).map_err(engine_err)?;
                let rendered: Vec<String> = models.iter().map(|m| m.render()).collect();
                json!({ "kind": "modelexpand", "satisfiable": !rendered.is_empty(), "models": rendered })
            }
            InferenceKind::Propagate => match engine::propagate(theory, structure, &ctx).map_err(engine_err)? {
                Propagation::Refined(p) => json!({ "kind": "propagate", "satisfiable": true, "structure": p.render() }),
                Propagation::Inconsistent => json!({ "kind": "propagate", "satisfiable": false, "structure": null }),
            },
            InferenceKind::Unsatcore => match engine::unsatcore(theory, structure, &ctx) {
                Ok(core) => json!({
                    "kind": "unsatcore",
                    "satisfiable": false,
                    "diagnostics": core.to_diagnostics(),
                    "core": core.render(),
                }),
                Err(EngineError::Satisfiable) => json!({ "kind": "unsatcore", "satisfiable": true, "diagnostics": [] }),
                Err(e) => return Err(engine_err(e)),
            },
        }))
    })
    .await?
}

async fn list_tutorials(State(state): State<Arc<AppState>>) -> Json<Value> {
    Json(json!(tutorials::summaries(&state.tutorials)))
}

async fn get_tutorial(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    state
        .tutorials
        .iter()
        .find(|t| t.id == id)
        .map(|t| Json(json!(t)))
        .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("tutorial {id} not found")))
}

#[derive(Deserialize)]
struct ShareRequest {
    files: BTreeMap<String, String>,
}

async fn create_share(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    body: Result<Json<ShareRequest>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let Json(req) = body?;
    let id = state.share.create(req.files).await?;
    let origin = match &state.config.public_url {
        Some(u) => u.trim_end_matches('/').to_string(),
        None => {
            let host = headers
                .get(header::HOST)
                .and_then(|h| h.to_str().ok())
                .unwrap_or("localhost");
            format!("http://{host}")
        }
    };
    let url = format!("{origin}/#share={id}");
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "url": url }))))
}

async fn fetch_share(State(state): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let files = state.share.fetch(&id).await?;
    Ok(Json(json!({ "id": id, "files": files })))
}

#[derive(Deserialize)]
struct TextRequest {
    text: String,
}

async fn highlight(body: Result<Json<TextRequest>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    Ok(Json(json!({ "spans": classify(&tokenize(&req.text)) })))
}

#[derive(Deserialize)]
struct CompleteRequest {
    text: String,
    /// Char offset.
    cursor: usize,
}

async fn complete(
    State(state): State<Arc<AppState>>,
    body: Result<Json<CompleteRequest>, JsonRejection>,
) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    Ok(Json(
        json!({ "completions": completions(&req.text, req.cursor, &state.snippets) }),
    ))
}

async fn reindent_text(body: Result<Json<TextRequest>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    Ok(Json(json!({ "text": reindent(&req.text) })))
}

async fn display_symbols(body: Result<Json<TextRequest>, JsonRejection>) -> ApiResult<Json<Value>> {
    let Json(req) = body?;
    let (text, map) = replace_symbols(&req.text, &SymbolMap::default());
    Ok(Json(json!({ "text": text, "map": map })))
}
