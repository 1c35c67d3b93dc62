//! HTTP session API. Every mutation goes through [`GameSession`], i.e. the
//! same referee path as batch games.
//!
//! | method | path | body |
//! |---|---|---|
//! | POST | `/api/sessions` | [`CreateSession`], answers `{"id", "state"}` |
//! | GET | `/api/sessions/{id}` | |
//! | POST | `/api/sessions/{id}/step` | |
//! | POST | `/api/sessions/{id}/assign` | `{"chain": <int> \| "new"}` |
//! | POST | `/api/sessions/{id}/present` | `{"down": [..], "up": [..]}` |
//! | POST | `/api/sessions/{id}/stop` | |
//! | GET | `/api/sessions/{id}/intervals` | |
//! | GET | `/api/strategies` | |
//!
//! Errors are `{"code", "message", "event_index"?}` with a 4xx status.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, RwLock};

use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chainpart_core::arena::{Actor, Fault, StepOutcome};
use chainpart_core::partition::ALGORITHM_NAMES;
use chainpart_core::spoiler::SPOILER_NAMES;
use chainpart_core::{
    ChainChoice, ChainId, Event, GameConfig, GameSession, HumanRole, Mode, Outcome, PointId,
    RefereeError,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

#[derive(Default)]
pub struct AppState {
    sessions: RwLock<HashMap<u64, Arc<RwLock<GameSession>>>>,
    next_id: AtomicU64,
}

pub fn router() -> Router {
    router_with(Arc::new(AppState::default()))
}

pub fn router_with(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/strategies", get(strategies))
        .route("/api/sessions", post(create))
        .route("/api/sessions/{id}", get(show))
        .route("/api/sessions/{id}/step", post(step))
        .route("/api/sessions/{id}/assign", post(assign))
        .route("/api/sessions/{id}/present", post(present))
        .route("/api/sessions/{id}/stop", post(stop))
        .route("/api/sessions/{id}/intervals", get(intervals))
        .with_state(state)
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    status: StatusCode,
    code: String,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    event_index: Option<usize>,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code: code.to_string(),
            message: message.into(),
            event_index: None,
        }
    }

    fn referee(err: RefereeError, event_index: Option<usize>) -> Self {
        let status = match err {
            RefereeError::NotYourTurn | RefereeError::GameOver => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        ApiError {
            status,
            code: err.code(),
            message: err.to_string(),
            event_index,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

// Parsed by hand so malformed bodies get the same error shape as everything else.
fn parse<T: DeserializeOwned>(body: &str) -> ApiResult<T> {
    let body = if body.trim().is_empty() { "{}" } else { body };
    serde_json::from_str(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "bad_request", e.to_string()))
}

fn session(state: &AppState, id: u64) -> ApiResult<Arc<RwLock<GameSession>>> {
    state
        .sessions
        .read()
        .expect("session map lock")
        .get(&id)
        .cloned()
        .ok_or_else(|| {
            ApiError::new(
                StatusCode::NOT_FOUND,
                "unknown_session",
                format!("no session {id}"),
            )
        })
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    #[serde(default)]
    pub mode: Mode,
    pub w: usize,
    #[serde(default = "default_spoiler")]
    pub spoiler: String,
    #[serde(default = "default_algorithm")]
    pub algorithm: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub points: Option<usize>,
    #[serde(default)]
    pub human_role: HumanRole,
}

fn default_spoiler() -> String {
    "golden".to_string()
}

fn default_algorithm() -> String {
    "alg".to_string()
}

#[derive(Serialize)]
struct PointView {
    id: PointId,
    down: Vec<PointId>,
    up: Vec<PointId>,
    chain: Option<ChainId>,
}

#[derive(Serialize)]
struct SessionView {
    id: u64,
    config: GameConfig,
    human_role: HumanRole,
    next_actor: Actor,
    awaiting_human: bool,
    pending: Option<PointId>,
    /// Existing chains the pending point may join; "new" is always allowed.
    valid_chains: Vec<ChainId>,
    maximal_points: Vec<PointId>,
    points: Vec<PointView>,
    chains: Vec<Vec<PointId>>,
    chains_used: usize,
    width: usize,
    bound: u64,
    outcome: Option<Outcome>,
    fault: Option<Fault>,
    events: Vec<Event>,
}

fn view(id: u64, s: &GameSession) -> SessionView {
    let referee = s.referee();
    let order = referee.order();
    let partition = referee.partition();
    let pending = referee.pending();
    SessionView {
        id,
        config: s.config().clone(),
        human_role: s.human_role(),
        next_actor: s.next_actor(),
        awaiting_human: s.awaiting_human(),
        pending,
        valid_chains: pending
            .map(|p| partition.valid_chains(order, p))
            .unwrap_or_default(),
        maximal_points: order.maximal_points(),
        points: order
            .points()
            .map(|p| PointView {
                id: p,
                down: order.down_ids(p),
                up: order.up_ids(p),
                chain: partition.chain_of(p),
            })
            .collect(),
        chains: partition.chains().to_vec(),
        chains_used: partition.chain_count(),
        width: order.width(),
        bound: crate::commands::mode_bound(s.config().mode, s.config().w),
        outcome: s.outcome(),
        fault: s.fault().cloned(),
        events: s.events(),
    }
}

#[derive(Serialize)]
struct MoveResponse {
    step: StepOutcome,
    session: SessionView,
}

async fn strategies() -> Json<Value> {
    Json(json!({
        "spoilers": SPOILER_NAMES,
        "algorithms": ALGORITHM_NAMES,
        "modes": ["up_growing", "general"],
        "human_roles": ["none", "algorithm", "spoiler"],
    }))
}

async fn create(
    State(state): State<Arc<AppState>>,
    body: String,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let req: CreateSession = parse(&body)?;
    let mut config =
        GameConfig::new(req.mode, req.w, &req.spoiler, &req.algorithm).with_seed(req.seed);
    config.points = req.points;
    let session =
        GameSession::new(config, req.human_role).map_err(|e| ApiError::referee(e, None))?;
    let id = state.next_id.fetch_add(1, Ordering::Relaxed) + 1;
    let v = view(id, &session);
    state
        .sessions
        .write()
        .expect("session map lock")
        .insert(id, Arc::new(RwLock::new(session)));
    Ok((StatusCode::CREATED, Json(json!({ "id": id, "state": v }))))
}

async fn show(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
) -> ApiResult<Json<SessionView>> {
    let s = session(&state, id)?;
    let guard = s.read().expect("session lock");
    Ok(Json(view(id, &guard)))
}

fn mutate(
    state: &AppState,
    id: u64,
    f: impl FnOnce(&mut GameSession) -> Result<StepOutcome, RefereeError>,
) -> ApiResult<Json<MoveResponse>> {
    let s = session(state, id)?;
    let mut guard = s.write().expect("session lock");
    let index = guard.events().len();
    let step = f(&mut guard).map_err(|e| ApiError::referee(e, Some(index)))?;
    Ok(Json(MoveResponse {
        step,
        session: view(id, &guard),
    }))
}

async fn step(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
) -> ApiResult<Json<MoveResponse>> {
    mutate(&state, id, GameSession::step)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ChainArg {
    Index(ChainId),
    Word(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AssignBody {
    chain: ChainArg,
}

async fn assign(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: String,
) -> ApiResult<Json<MoveResponse>> {
    let body: AssignBody = parse(&body)?;
    let choice = match body.chain {
        ChainArg::Index(c) => ChainChoice::Existing(c),
        ChainArg::Word(w) if w == "new" => ChainChoice::New,
        ChainArg::Word(w) => {
            return Err(ApiError::new(
                StatusCode::BAD_REQUEST,
                "bad_request",
                format!("chain must be an index or \"new\", got {w:?}"),
            ))
        }
    };
    mutate(&state, id, |s| s.human_assign(choice))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PresentBody {
    #[serde(default)]
    down: Vec<PointId>,
    #[serde(default)]
    up: Vec<PointId>,
}

async fn present(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
    body: String,
) -> ApiResult<Json<MoveResponse>> {
    let body: PresentBody = parse(&body)?;
    mutate(&state, id, |s| s.human_present(&body.down, &body.up))
}

async fn stop(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
) -> ApiResult<Json<MoveResponse>> {
    mutate(&state, id, GameSession::stop)
}

async fn intervals(
    State(state): State<Arc<AppState>>,
    Path(id): Path<u64>,
) -> ApiResult<Json<Value>> {
    let s = session(&state, id)?;
    let guard = s.read().expect("session lock");
    let rep = guard
        .referee()
        .order()
        .interval_representation()
        .map_err(|e| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "internal_infeasible",
                e.to_string(),
            )
        })?;
    let left: Vec<Value> = rep
        .left
        .iter()
        .enumerate()
        .map(|(i, r)| json!({ "id": i, "num": r.numer(), "den": r.denom() }))
        .collect();
    Ok(Json(json!({ "left_endpoints": left })))
}
