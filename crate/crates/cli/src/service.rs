//! HTTP access to one deliberation session.
//!
//! Writes hold the session lock exclusively, reads share it. Every response
//! carries the session revision, in the `x-revision` header and, for JSON
//! bodies, in a `revision` field.

use std::sync::Arc;

use argdec::dot;
use argdec::session::{Session, SessionError};
use axum::extract::rejection::JsonRejection;
use axum::extract::{Query, Request, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value as Json_};
use tokio::sync::RwLock;

pub const REVISION_HEADER: &str = "x-revision";

type Shared = Arc<RwLock<Session>>;

#[derive(Debug, Deserialize)]
pub struct StatementRequest {
    pub statement: String,
    /// The revision the client last saw; stale values are refused.
    pub revision: Option<u64>,
}

#[derive(Debug, Deserialize)]
pub struct QueryRequest {
    pub literal: String,
}

#[derive(Debug, Default, Deserialize)]
pub struct UndoRequest {
    pub revision: Option<u64>,
}

#[derive(Debug, Deserialize)]
pub struct GraphParams {
    pub literal: Option<String>,
}

pub fn router(session: Session) -> Router {
    let state: Shared = Arc::new(RwLock::new(session));
    Router::new()
        .route("/health", get(health))
        .route("/session", get(snapshot))
        .route("/statements", post(statements))
        .route("/query", post(query))
        .route("/graph.dot", get(graph))
        .route("/undo", post(undo))
        .layer(middleware::from_fn_with_state(state.clone(), stamp))
        .with_state(state)
}

async fn stamp(State(state): State<Shared>, req: Request, next: Next) -> Response {
    let mut res = next.run(req).await;
    if !res.headers().contains_key(REVISION_HEADER) {
        let rev = state.read().await.revision();
        res.headers_mut().insert(REVISION_HEADER, HeaderValue::from(rev));
    }
    res
}

fn reply(status: StatusCode, revision: u64, mut body: Json_) -> Response {
    body["revision"] = json!(revision);
    let mut res = (status, Json(body)).into_response();
    res.headers_mut()
        .insert(REVISION_HEADER, HeaderValue::from(revision));
    res
}

fn failure(revision: u64, e: &SessionError) -> Response {
    let (status, error) = match e {
        SessionError::Parse(p) => (
            StatusCode::BAD_REQUEST,
            json!({"kind": "parse", "message": p.message, "line": p.line, "column": p.column}),
        ),
        SessionError::Conflict { given, current } => (
            StatusCode::CONFLICT,
            json!({"kind": "conflict", "message": e.to_string(), "given": given, "current": current}),
        ),
        SessionError::NothingToUndo => (
            StatusCode::BAD_REQUEST,
            json!({"kind": "empty_history", "message": e.to_string()}),
        ),
        SessionError::Engine(_) => (
            StatusCode::UNPROCESSABLE_ENTITY,
            json!({"kind": "engine", "message": e.to_string()}),
        ),
    };
    reply(status, revision, json!({"error": error}))
}

fn bad_request(revision: u64, message: String) -> Response {
    reply(
        StatusCode::BAD_REQUEST,
        revision,
        json!({"error": {"kind": "request", "message": message}}),
    )
}

async fn health(State(state): State<Shared>) -> Response {
    let rev = state.read().await.revision();
    reply(StatusCode::OK, rev, json!({"status": "ok"}))
}

async fn snapshot(State(state): State<Shared>) -> Response {
    let s = state.read().await;
    let body = serde_json::to_value(s.snapshot()).expect("json");
    reply(StatusCode::OK, s.revision(), body)
}

async fn statements(
    State(state): State<Shared>,
    body: Result<Json<StatementRequest>, JsonRejection>,
) -> Response {
    let mut s = state.write().await;
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return bad_request(s.revision(), e.body_text()),
    };
    match s.add(&req.statement, req.revision) {
        Ok(w) => reply(StatusCode::OK, w.revision, serde_json::to_value(&w).expect("json")),
        Err(e) => failure(s.revision(), &e),
    }
}

async fn undo(State(state): State<Shared>, body: Option<Json<UndoRequest>>) -> Response {
    let mut s = state.write().await;
    let req = body.map(|Json(r)| r).unwrap_or_default();
    match s.undo(req.revision) {
        Ok(w) => reply(StatusCode::OK, w.revision, serde_json::to_value(&w).expect("json")),
        Err(e) => failure(s.revision(), &e),
    }
}

async fn query(
    State(state): State<Shared>,
    body: Result<Json<QueryRequest>, JsonRejection>,
) -> Response {
    let s = state.read().await;
    let req = match body {
        Ok(Json(r)) => r,
        Err(e) => return bad_request(s.revision(), e.body_text()),
    };
    match s.query(&req.literal) {
        Ok(t) => reply(StatusCode::OK, s.revision(), json!({"trace": t})),
        Err(e) => failure(s.revision(), &e),
    }
}

async fn graph(State(state): State<Shared>, Query(params): Query<GraphParams>) -> Response {
    let s = state.read().await;
    let Some(literal) = params.literal else {
        return bad_request(s.revision(), "missing query parameter `literal`".into());
    };
    match s.query(&literal) {
        Ok(t) => {
            let mut res = dot::export_dot(&t).into_response();
            let h = res.headers_mut();
            h.insert(header::CONTENT_TYPE, HeaderValue::from_static("text/vnd.graphviz"));
            h.insert(REVISION_HEADER, HeaderValue::from(s.revision()));
            res
        }
        Err(e) => failure(s.revision(), &e),
    }
}
