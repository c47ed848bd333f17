//! REST endpoints over a [`ProblemManager`].
//!
//! The endpoint set is fixed by [`ROUTES`], which a test keeps equal to the
//! checked-in `contract/routes.txt`. Solving is asynchronous: a PATCH that
//! starts a solve returns at once and clients poll the problem document.

use std::future::Future;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{self, MethodRouter};
use axum::{Json, Router};
use metasolve_meta::{MetaError, Problem, ProblemId, ProblemManager, ProblemPatch, SolverDescriptor};
use serde::Deserialize;
use serde_json::json;
use tower_http::cors::CorsLayer;

/// Machine-readable API description served at `/openapi`.
pub const OPENAPI: &str = include_str!("../contract/openapi.json");

/// Every endpoint, as `(method, path)`.
pub const ROUTES: [(&str, &str); 9] = [
    ("GET", "/problems/{problemType}"),
    ("POST", "/problems/{problemType}"),
    ("GET", "/problems/{problemType}/{problemId}"),
    ("PATCH", "/problems/{problemType}/{problemId}"),
    ("GET", "/problems/{problemType}/{problemId}/bound"),
    ("GET", "/problems/{problemType}/{problemId}/bound/compare"),
    ("GET", "/solvers/{problemType}"),
    ("GET", "/solvers/{problemType}/{solverId}/sub-routines"),
    ("GET", "/solvers/{problemType}/{solverId}/settings"),
];

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into() }
    }
}

pub fn status_of(e: &MetaError) -> StatusCode {
    match e {
        MetaError::UnknownProblemType(_)
        | MetaError::UnknownProblem(_)
        | MetaError::UnknownSolver(_)
        | MetaError::NoBound(_) => StatusCode::NOT_FOUND,
        MetaError::SolverTypeMismatch { .. } | MetaError::InvalidSetting { .. } | MetaError::InvalidRequest(_) => {
            StatusCode::BAD_REQUEST
        }
        MetaError::IllegalState { .. } | MetaError::MissingValue(_) => StatusCode::CONFLICT,
        MetaError::Unparseable(_) => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl From<MetaError> for ApiError {
    fn from(e: MetaError) -> Self {
        Self::new(status_of(&e), e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.message, "status": self.status.as_u16() });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Router with CORS and `/openapi`, backed by `manager`.
pub fn router(manager: ProblemManager) -> Router {
    let mut app = Router::new();
    for (method, path) in ROUTES {
        app = app.route(path, endpoint(method, path));
    }
    app.route("/openapi", routing::get(openapi))
        .fallback(|| async { ApiError::new(StatusCode::NOT_FOUND, "no such endpoint") })
        .layer(CorsLayer::permissive())
        .with_state(manager)
}

fn endpoint(method: &str, path: &str) -> MethodRouter<ProblemManager> {
    match (method, path) {
        ("GET", "/problems/{problemType}") => routing::get(list_problems),
        ("POST", "/problems/{problemType}") => routing::post(create_problem),
        ("GET", "/problems/{problemType}/{problemId}") => routing::get(get_problem),
        ("PATCH", "/problems/{problemType}/{problemId}") => routing::patch(patch_problem),
        ("GET", "/problems/{problemType}/{problemId}/bound") => routing::get(bound),
        ("GET", "/problems/{problemType}/{problemId}/bound/compare") => routing::get(compare_bound),
        ("GET", "/solvers/{problemType}") => routing::get(list_solvers),
        ("GET", "/solvers/{problemType}/{solverId}/sub-routines") => routing::get(sub_routines),
        ("GET", "/solvers/{problemType}/{solverId}/settings") => routing::get(settings),
        _ => unreachable!("no handler for {method} {path}"),
    }
}

/// Serves until `shutdown` resolves.
pub async fn serve(
    listener: tokio::net::TcpListener,
    manager: ProblemManager,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(manager)).with_graceful_shutdown(shutdown).await
}

async fn openapi() -> impl IntoResponse {
    ([(header::CONTENT_TYPE, HeaderValue::from_static("application/json"))], OPENAPI)
}

fn known_type(m: &ProblemManager, type_id: &str) -> ApiResult<()> {
    match m.registry().problem_type(type_id) {
        Some(_) => Ok(()),
        None => Err(MetaError::UnknownProblemType(type_id.into()).into()),
    }
}

/// Lookups are scoped to the type in the path: a problem of another type is not found.
fn scoped(m: &ProblemManager, type_id: &str, raw_id: &str) -> ApiResult<Problem> {
    known_type(m, type_id)?;
    let not_found = || ApiError::new(StatusCode::NOT_FOUND, format!("no {type_id} problem with id {raw_id}"));
    let id = ProblemId::parse(raw_id).ok_or_else(not_found)?;
    let p = m.get(id).map_err(|_| not_found())?;
    if p.type_id != type_id {
        return Err(not_found());
    }
    Ok(p)
}

async fn list_problems(State(m): State<ProblemManager>, Path(type_id): Path<String>) -> ApiResult<impl IntoResponse> {
    Ok(Json(m.list(&type_id)?))
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct CreateBody {
    type_id: String,
    input: String,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("malformed body: {e}")))
}

async fn create_problem(
    State(m): State<ProblemManager>,
    Path(type_id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    known_type(&m, &type_id)?;
    let body: CreateBody = parse_body(&body)?;
    if body.type_id != type_id {
        let msg = format!("body typeId '{}' does not match path type '{type_id}'", body.type_id);
        return Err(ApiError::new(StatusCode::BAD_REQUEST, msg));
    }
    let p = m.create(&type_id, body.input)?;
    let location = format!("/problems/{type_id}/{}", p.id);
    Ok((StatusCode::CREATED, [(header::LOCATION, location)], Json(p)))
}

async fn get_problem(
    State(m): State<ProblemManager>,
    Path((type_id, id)): Path<(String, String)>,
) -> ApiResult<Json<Problem>> {
    scoped(&m, &type_id, &id).map(Json)
}

async fn patch_problem(
    State(m): State<ProblemManager>,
    Path((type_id, id)): Path<(String, String)>,
    body: Bytes,
) -> ApiResult<Json<Problem>> {
    let p = scoped(&m, &type_id, &id)?;
    let patch: ProblemPatch = parse_body(&body)?;
    Ok(Json(m.patch(p.id, patch)?))
}

async fn bound(
    State(m): State<ProblemManager>,
    Path((type_id, id)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    let p = scoped(&m, &type_id, &id)?;
    Ok(Json(m.bound(p.id)?))
}

async fn compare_bound(
    State(m): State<ProblemManager>,
    Path((type_id, id)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    let p = scoped(&m, &type_id, &id)?;
    Ok(Json(m.compare_bound(p.id)?))
}

async fn list_solvers(State(m): State<ProblemManager>, Path(type_id): Path<String>) -> ApiResult<impl IntoResponse> {
    let solvers: Vec<SolverDescriptor> = m.registry().list_solvers(&type_id)?.into_iter().cloned().collect();
    Ok(Json(solvers))
}

fn descriptor(m: &ProblemManager, type_id: &str, solver_id: &str) -> ApiResult<SolverDescriptor> {
    known_type(m, type_id)?;
    match m.registry().solver(solver_id).map(|s| s.descriptor()) {
        Some(d) if d.problem_type_id == type_id => Ok(d.clone()),
        _ => Err(ApiError::new(StatusCode::NOT_FOUND, format!("no {type_id} solver '{solver_id}'"))),
    }
}

async fn sub_routines(
    State(m): State<ProblemManager>,
    Path((type_id, solver_id)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(descriptor(&m, &type_id, &solver_id)?.sub_routines))
}

async fn settings(
    State(m): State<ProblemManager>,
    Path((type_id, solver_id)): Path<(String, String)>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(descriptor(&m, &type_id, &solver_id)?.settings))
}
