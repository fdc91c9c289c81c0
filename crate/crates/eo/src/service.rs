//! HTTP facade over one engine.

use std::convert::Infallible;
use std::sync::{Arc, Mutex, MutexGuard};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::sse::{Event as SseEvent, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use eo_core::{Engine, EngineError, EventId, Value};
use futures::stream::{self, Stream, StreamExt};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::watch;

use crate::documents;
use crate::format::{value_from_json, Record};
use crate::view::{control_value, resolve_view, views_of, ViewError};

pub struct Shared {
    engine: Mutex<Engine>,
    appended: watch::Sender<usize>,
}

pub type AppState = Arc<Shared>;

impl Shared {
    pub fn new(engine: Engine) -> AppState {
        let (appended, _) = watch::channel(engine.graph().len());
        Arc::new(Shared {
            engine: Mutex::new(engine),
            appended,
        })
    }

    pub fn engine(&self) -> MutexGuard<'_, Engine> {
        self.engine.lock().unwrap_or_else(|p| p.into_inner())
    }

    fn publish(&self, engine: &Engine) {
        self.appended.send_replace(engine.graph().len());
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl ToString) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.to_string() }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match &e {
            EngineError::UnknownIndividual(_)
            | EngineError::UnknownProperty { .. }
            | EngineError::UnknownAction { .. } => StatusCode::NOT_FOUND,
            EngineError::ActionUnavailable { .. } => StatusCode::CONFLICT,
            EngineError::NotEditable { .. } => StatusCode::FORBIDDEN,
            _ => StatusCode::BAD_REQUEST,
        };
        let mut err = ApiError::new(status, &e);
        if let EngineError::Analysis(report) = &e {
            err.body["report"] = documents::report(report);
        }
        err
    }
}

impl From<ViewError> for ApiError {
    fn from(e: ViewError) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, e)
    }
}

type ApiResult = Result<Json<serde_json::Value>, ApiError>;

#[derive(Debug, Default, Deserialize)]
pub struct ValueBody {
    #[serde(default)]
    pub value: Option<serde_json::Value>,
}

fn body_value(body: Option<Json<ValueBody>>) -> Result<Option<Value>, ApiError> {
    match body.and_then(|Json(b)| b.value) {
        None => Ok(None),
        Some(v) => value_from_json(&v)
            .map(Some)
            .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e)),
    }
}

async fn get_view(State(state): State<AppState>, Path(name): Path<String>) -> ApiResult {
    let engine = state.engine();
    Ok(Json(serde_json::to_value(resolve_view(&engine, &name)?).expect("serializable")))
}

fn first_view(engine: &Engine, individual: &str) -> serde_json::Value {
    views_of(engine, individual)
        .first()
        .and_then(|v| resolve_view(engine, v).ok())
        .map(|s| serde_json::to_value(s).expect("serializable"))
        .unwrap_or(serde_json::Value::Null)
}

async fn trigger(
    State(state): State<AppState>,
    Path((name, property)): Path<(String, String)>,
    body: Option<Json<ValueBody>>,
) -> ApiResult {
    let value = body_value(body)?;
    let mut engine = state.engine();
    let value = value
        .or_else(|| control_value(&engine, &name, &property))
        .unwrap_or(Value::Number(1.0));
    let result = engine.trigger_action(&name, &property, value, "player");
    state.publish(&engine);
    let result = result?;
    Ok(Json(json!({
        "result": documents::cascade(&engine, &result),
        "view": first_view(&engine, &name),
    })))
}

async fn set_property(
    State(state): State<AppState>,
    Path((name, property)): Path<(String, String)>,
    body: Option<Json<ValueBody>>,
) -> ApiResult {
    let value = body_value(body)?.ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "missing `value`"))?;
    let mut engine = state.engine();
    let result = engine.set_property(&name, &property, value, "player");
    state.publish(&engine);
    let result = result?;
    Ok(Json(json!({
        "result": documents::cascade(&engine, &result),
        "view": first_view(&engine, &name),
    })))
}

#[derive(Debug, Deserialize)]
pub struct SinceQuery {
    since: Option<String>,
}

fn parse_id(s: &str) -> Result<EventId, ApiError> {
    s.parse().map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e))
}

/// Records appended after position `start`, then every later append, in order.
pub fn event_stream(state: AppState, start: usize) -> impl Stream<Item = Record> {
    let rx = state.appended.subscribe();
    stream::unfold((start, rx, state), |(mut cursor, mut rx, state)| async move {
        loop {
            rx.borrow_and_update();
            let batch: Vec<Record> = {
                let engine = state.engine();
                engine.graph().events()[cursor..].iter().map(Record::from).collect()
            };
            if !batch.is_empty() {
                cursor += batch.len();
                return Some((stream::iter(batch), (cursor, rx, state)));
            }
            if rx.changed().await.is_err() {
                return None;
            }
        }
    })
    .flatten()
}

async fn events(
    State(state): State<AppState>,
    Query(q): Query<SinceQuery>,
) -> Result<Sse<impl Stream<Item = Result<SseEvent, Infallible>>>, ApiError> {
    let start = match q.since.as_deref().filter(|s| !s.is_empty()) {
        None => 0,
        Some(s) => {
            let id = parse_id(s)?;
            let engine = state.engine();
            engine
                .graph()
                .position(id)
                .ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, format!("unknown event {id}")))?
                + 1
        }
    };
    let stream = event_stream(state, start).map(|r| {
        Ok(SseEvent::default()
            .id(r.id.clone())
            .json_data(&r)
            .expect("records serialize"))
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

#[derive(Debug, Deserialize)]
pub struct DepthQuery {
    depth: Option<usize>,
}

async fn trace(State(state): State<AppState>, Path(id): Path<String>, Query(q): Query<DepthQuery>) -> ApiResult {
    let id = parse_id(&id)?;
    let engine = state.engine();
    let t = engine
        .graph()
        .causal_trace(id, q.depth.unwrap_or(usize::MAX))
        .map_err(|e| ApiError::new(StatusCode::NOT_FOUND, e))?;
    Ok(Json(documents::trace(&engine, &t)))
}

async fn analysis(State(state): State<AppState>) -> ApiResult {
    let engine = state.engine();
    Ok(Json(documents::report(&engine.analyze())))
}

async fn load(State(state): State<AppState>, body: String) -> ApiResult {
    let mut engine = state.engine();
    let summary = engine.load(&body);
    state.publish(&engine);
    let summary = summary?;
    Ok(Json(json!({
        "registration": documents::registration(&summary.registration),
        "result": documents::cascade(&engine, &summary.cascade),
    })))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/views/:name", get(get_view))
        .route("/api/individuals/:name/actions/:property", post(trigger))
        .route("/api/individuals/:name/properties/:property", post(set_property))
        .route("/api/events", get(events))
        .route("/api/trace/:event_id", get(trace))
        .route("/api/analysis", get(analysis))
        .route("/api/load", post(load))
        .with_state(state)
}

pub async fn serve(addr: &str, engine: Engine) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(Shared::new(engine))).await
}
