//! HTTP service for interactive sessions.
//!
//! | method | path | effect |
//! |---|---|---|
//! | POST | `/sessions` | create a paused session |
//! | GET | `/sessions/{id}` | current status, weights and positions |
//! | PATCH | `/sessions/{id}/weights` | replace the weights |
//! | POST | `/sessions/{id}/drag` | move (and optionally pin) a node |
//! | POST | `/sessions/{id}/pause`, `/resume` | lifecycle |
//! | DELETE | `/sessions/{id}` | stop and forget the session |
//! | GET | `/sessions/{id}/stream` | newline-delimited JSON events |
//! | GET | `/sessions/{id}/layout`, `/svg` | export the current layout |
//!
//! Each session runs its optimizer on its own thread; see [`session`].

pub mod session;

use std::collections::{BTreeMap, HashMap};
use std::convert::Infallible;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::time::Duration;

use axum::body::{Body, Bytes};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use gdlayout_core::graph::shortest_paths;
use gdlayout_core::{
    criteria, random_layout, CriterionId, DistanceMatrix, Graph, Hyper, Layout, NpConfig, Optimizer, Vec2,
    WeightSchedule, Weights,
};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::{broadcast, oneshot};

use self::session::{Command, Event, Status, View};
use crate::io::{self, CriterionMap, GraphFile, LayoutMeta, NamedGraph, ScheduleFile, SvgOptions};
use crate::settings::{FamilySpec, RunSettings};

#[derive(Debug, Clone)]
pub struct ServiceOptions {
    /// How long a stream may stay silent before a heartbeat is sent.
    pub heartbeat: Duration,
}

impl Default for ServiceOptions {
    fn default() -> Self {
        ServiceOptions { heartbeat: Duration::from_secs(1) }
    }
}

struct Handle {
    commands: Mutex<mpsc::Sender<Command>>,
    events: broadcast::Sender<Event>,
    view: Arc<Mutex<View>>,
    graph: Graph,
    dist: DistanceMatrix,
    np: NpConfig,
    hyper: Hyper,
    seed: u64,
}

impl Handle {
    fn send(&self, c: Command) -> Result<(), ApiError> {
        self.commands.lock().unwrap().send(c).map_err(|_| ApiError::gone())
    }
}

struct Inner {
    sessions: Mutex<HashMap<String, Arc<Handle>>>,
    next_id: AtomicU64,
    options: ServiceOptions,
}

type AppState = Arc<Inner>;

pub fn router() -> Router {
    router_with(ServiceOptions::default())
}

pub fn router_with(options: ServiceOptions) -> Router {
    let state = Arc::new(Inner { sessions: Mutex::default(), next_id: AtomicU64::new(1), options });
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}", get(describe).delete(remove))
        .route("/sessions/{id}/weights", patch(set_weights))
        .route("/sessions/{id}/drag", post(drag))
        .route("/sessions/{id}/pause", post(pause))
        .route("/sessions/{id}/resume", post(resume))
        .route("/sessions/{id}/stream", get(stream))
        .route("/sessions/{id}/layout", get(layout))
        .route("/sessions/{id}/svg", get(svg))
        .with_state(state)
}

pub async fn serve(addr: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router()).await
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl ApiError {
    fn bad(message: impl Into<String>) -> Self {
        ApiError(StatusCode::BAD_REQUEST, message.into())
    }

    fn gone() -> Self {
        ApiError(StatusCode::INTERNAL_SERVER_ERROR, "session thread has stopped".into())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

fn lookup(state: &AppState, id: &str) -> Result<Arc<Handle>, ApiError> {
    state
        .sessions
        .lock()
        .unwrap()
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session {id:?}")))
}

async fn ask<T>(h: &Handle, make: impl FnOnce(oneshot::Sender<Result<T, String>>) -> Command) -> Result<T, ApiError> {
    let (tx, rx) = oneshot::channel();
    h.send(make(tx))?;
    rx.await.map_err(|_| ApiError::gone())?.map_err(ApiError::bad)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CreateSession {
    #[serde(default)]
    graph: Option<GraphFile>,
    #[serde(default)]
    family: Option<FamilySpec>,
    #[serde(default)]
    init: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    weights: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    schedule: Option<ScheduleFile>,
    #[serde(default, flatten)]
    run: RunSettings,
    /// Snapshot period in iterations.
    #[serde(default = "default_cadence")]
    cadence: usize,
}

fn default_cadence() -> usize {
    10
}

fn parse_weight_map(map: &BTreeMap<String, f64>) -> Result<Weights, ApiError> {
    let mut w = Weights::zero();
    for (name, &value) in map {
        let c: CriterionId = name.parse().map_err(|e: gdlayout_core::Error| ApiError::bad(e.to_string()))?;
        w.set(c, value);
    }
    w.validate().map_err(|e| ApiError::bad(e.to_string()))?;
    Ok(w)
}

async fn create(State(state): State<AppState>, Json(body): Json<CreateSession>) -> Result<Response, ApiError> {
    let named = match (body.graph, &body.family) {
        (Some(file), None) => NamedGraph::try_from(file).map_err(|e| ApiError::bad(e.to_string()))?,
        (None, Some(spec)) => {
            let family = spec.to_family().map_err(ApiError::bad)?;
            NamedGraph::from(Graph::generate(family).map_err(|e| ApiError::bad(e.to_string()))?)
        }
        _ => return Err(ApiError::bad("give exactly one of \"graph\" and \"family\"")),
    };
    let schedule = match (&body.weights, body.schedule) {
        (Some(map), None) => WeightSchedule::constant(parse_weight_map(map)?),
        (None, Some(s)) => s.0,
        (None, None) => WeightSchedule::constant(Weights::single(CriterionId::Stress, 1.0)),
        (Some(_), Some(_)) => return Err(ApiError::bad("give at most one of \"weights\" and \"schedule\"")),
    };
    let config = body.run.config().map_err(ApiError::bad)?;
    let graph = named.graph;
    let n = graph.node_count();
    let init = match body.init {
        Some(rows) => {
            Layout::new(rows.into_iter().map(Vec2::from).collect()).map_err(|e| ApiError::bad(e.to_string()))?
        }
        None => random_layout(n, config.seed),
    };
    let dist = shortest_paths(&graph).map_err(|e| ApiError::bad(e.to_string()))?;
    let (np, hyper, seed) = (config.np, config.hyper, config.seed);
    let opt = Optimizer::new(graph.clone(), init, schedule, config).map_err(|e| ApiError::bad(e.to_string()))?;

    let (events, _) = broadcast::channel(1024);
    let (commands, view, _thread) = session::spawn(opt, body.cadence, events.clone());
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::Relaxed));
    let handle = Handle { commands: Mutex::new(commands), events, view, graph, dist, np, hyper, seed };
    state.sessions.lock().unwrap().insert(id.clone(), Arc::new(handle));
    let body = json!({ "id": id, "status": Status::Paused, "iteration": 0, "nodes": n });
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

fn describe_view(id: &str, v: &View) -> serde_json::Value {
    json!({
        "id": id,
        "status": v.status,
        "iteration": v.iteration,
        "weights": CriterionMap(v.weights.active().collect()),
        "positions": v.positions,
        "error": v.error,
    })
}

async fn describe(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let view = h.view.lock().unwrap().clone();
    Ok(Json(describe_view(&id, &view)).into_response())
}

async fn remove(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let h = state
        .sessions
        .lock()
        .unwrap()
        .remove(&id)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session {id:?}")))?;
    let _ = h.send(Command::Shutdown);
    Ok(StatusCode::NO_CONTENT)
}

async fn set_weights(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(map): Json<BTreeMap<String, f64>>,
) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let w = parse_weight_map(&map)?;
    let at = ask(&h, |reply| Command::SetWeights(w, reply)).await?;
    Ok(Json(json!({ "applies_at": at })).into_response())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DragBody {
    node: usize,
    position: [f64; 2],
    #[serde(default)]
    hold: usize,
}

async fn drag(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(body): Json<DragBody>,
) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let at = Vec2::from(body.position);
    if !at.is_finite() {
        return Err(ApiError::bad("position must be finite"));
    }
    let iteration = ask(&h, |reply| Command::Drag { node: body.node, at, hold: body.hold, reply }).await?;
    Ok(Json(json!({ "applies_at": iteration })).into_response())
}

async fn lifecycle(
    state: AppState,
    id: String,
    make: fn(oneshot::Sender<Result<View, String>>) -> Command,
) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let view = ask(&h, make).await.map_err(|e| ApiError(StatusCode::CONFLICT, e.1))?;
    Ok(Json(json!({ "status": view.status, "iteration": view.iteration })).into_response())
}

async fn pause(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    lifecycle(state, id, Command::Pause).await
}

async fn resume(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    lifecycle(state, id, Command::Resume).await
}

fn current_layout(h: &Handle) -> (Layout, LayoutMeta) {
    let view = h.view.lock().unwrap().clone();
    let layout = Layout::new(view.positions.into_iter().map(Vec2::from).collect()).expect("session layouts are finite");
    (layout, LayoutMeta::new(h.seed, view.iteration, &view.schedule))
}

/// The current layout as a layout file, byte for byte what the command line
/// writes for the same run.
async fn layout(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let (layout, meta) = current_layout(&h);
    Ok(([(header::CONTENT_TYPE, "application/json")], io::write_layout(&layout, Some(&meta))).into_response())
}

async fn svg(State(state): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let (layout, _) = current_layout(&h);
    let bytes = io::export_svg(&h.graph, &layout, SvgOptions { edge_color_by_length: true });
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], bytes).into_response())
}

#[derive(Debug, Default, Deserialize)]
struct StreamQuery {
    #[serde(default)]
    qualities: bool,
}

struct StreamState {
    handle: Arc<Handle>,
    rx: broadcast::Receiver<Event>,
    pending: Option<Event>,
    /// Snapshots older than this were already covered by the opening event.
    since: usize,
    qualities: bool,
    heartbeat: Duration,
    done: bool,
}

impl StreamState {
    fn line(&self, mut event: Event) -> Bytes {
        if let (Event::Snapshot(s), true) = (&mut event, self.qualities) {
            let layout = Layout::new(s.positions.iter().copied().map(Vec2::from).collect());
            let q = layout.ok().and_then(|l| {
                criteria::all_qualities(&self.handle.graph, &self.handle.dist, &l, self.handle.np, &self.handle.hyper)
                    .ok()
            });
            s.qualities = q.map(|q| CriterionMap(q.iter().collect()));
        }
        let mut out = serde_json::to_vec(&event).expect("events always serialize");
        out.push(b'\n');
        Bytes::from(out)
    }

    async fn next(mut self) -> Option<(Result<Bytes, Infallible>, Self)> {
        if self.done {
            return None;
        }
        if let Some(e) = self.pending.take() {
            self.done = e.is_terminal();
            return Some((Ok(self.line(e)), self));
        }
        loop {
            match tokio::time::timeout(self.heartbeat, self.rx.recv()).await {
                Ok(Ok(Event::Snapshot(s))) if s.iteration < self.since => continue,
                Ok(Ok(e)) => {
                    self.done = e.is_terminal();
                    return Some((Ok(self.line(e)), self));
                }
                Ok(Err(broadcast::error::RecvError::Lagged(_))) => continue,
                Ok(Err(broadcast::error::RecvError::Closed)) => return None,
                Err(_) => {
                    let (status, iteration) = {
                        let v = self.handle.view.lock().unwrap();
                        (v.status, v.iteration)
                    };
                    let e = Event::Heartbeat { status, iteration };
                    return Some((Ok(self.line(e)), self));
                }
            }
        }
    }
}

/// Streams events as newline-delimited JSON. The first line is the current
/// status; the stream ends after a terminal status.
async fn stream(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<StreamQuery>,
) -> Result<Response, ApiError> {
    let h = lookup(&state, &id)?;
    let rx = h.events.subscribe();
    let (status, iteration, error) = {
        let v = h.view.lock().unwrap();
        (v.status, v.iteration, v.error.clone())
    };
    let st = StreamState {
        handle: h,
        rx,
        pending: Some(Event::Status { status, iteration, error }),
        since: iteration,
        qualities: query.qualities,
        heartbeat: state.options.heartbeat,
        done: false,
    };
    let body = Body::from_stream(futures::stream::unfold(st, StreamState::next));
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response())
}
