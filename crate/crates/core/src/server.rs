//! HTTP front end: one background thread per session, events polled or streamed.
//!
//! | method | path | |
//! |---|---|---|
//! | POST | `/sessions` | open a session |
//! | POST | `/sessions/{id}/messages` | send a user line (`{"text": ...}`) |
//! | GET | `/sessions/{id}/events?after=N&wait_ms=M` | events from index `N`, waiting up to `M` ms |
//! | GET | `/sessions/{id}/stream` | the same events as server-sent events |
//! | DELETE | `/sessions/{id}` | close a session |
//! | GET | `/bundles/{request_id}` | `bundle.json` of a past request |
//! | GET | `/bundles/{request_id}/{*path}` | a bundle file |

use std::collections::{HashMap, VecDeque};
use std::convert::Infallible;
use std::path::{Component, Path as FsPath};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{mpsc, Arc, Mutex};
use std::time::Duration;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use serde::{Deserialize, Serialize};
use tokio::net::TcpListener;
use tokio::sync::watch;

use crate::explain::BUNDLE_INDEX;
use crate::ghg::is_request_id;
use crate::session::{run_session, SessionError, SessionEvent, SessionIo, Workbench, WorkbenchConfig};

pub const MAX_WAIT_MS: u64 = 60_000;

/// Event as sent to clients: position in the session plus the tagged event.
#[derive(Debug, Clone, Serialize)]
pub struct IndexedEvent {
    pub seq: usize,
    #[serde(flatten)]
    pub event: SessionEvent,
}

struct SessionHandle {
    lines: Mutex<Option<mpsc::Sender<String>>>,
    log: Mutex<Vec<IndexedEvent>>,
    count: watch::Sender<usize>,
    closed: AtomicBool,
}

impl SessionHandle {
    fn since(&self, after: usize) -> Vec<IndexedEvent> {
        let log = self.log.lock().unwrap();
        log.get(after..).map(<[_]>::to_vec).unwrap_or_default()
    }

    fn close(&self) {
        self.closed.store(true, Ordering::SeqCst);
        self.lines.lock().unwrap().take();
        self.count.send_modify(|_| {});
    }

    fn is_closed(&self) -> bool {
        self.closed.load(Ordering::SeqCst)
    }
}

struct ServerIo {
    handle: Arc<SessionHandle>,
    lines: mpsc::Receiver<String>,
}

impl SessionIo for ServerIo {
    fn emit(&mut self, event: SessionEvent) {
        let n = {
            let mut log = self.handle.log.lock().unwrap();
            let seq = log.len();
            log.push(IndexedEvent { seq, event });
            log.len()
        };
        self.handle.count.send_replace(n);
    }

    fn answer(&mut self) -> Option<String> {
        self.lines.recv().ok()
    }
}

#[derive(Clone)]
struct AppState {
    workbench: Arc<Workbench>,
    sessions: Arc<Mutex<HashMap<String, Arc<SessionHandle>>>>,
    next_id: Arc<AtomicU64>,
}

impl AppState {
    fn session(&self, id: &str) -> Result<Arc<SessionHandle>, ApiError> {
        self.sessions
            .lock()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session {id}")))
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

#[derive(Serialize)]
struct Created {
    session_id: String,
}

async fn create_session(State(state): State<AppState>) -> (StatusCode, Json<Created>) {
    let id = format!("s{}", state.next_id.fetch_add(1, Ordering::SeqCst));
    let (tx, rx) = mpsc::channel();
    let handle = Arc::new(SessionHandle {
        lines: Mutex::new(Some(tx)),
        log: Mutex::new(Vec::new()),
        count: watch::Sender::new(0),
        closed: AtomicBool::new(false),
    });
    state.sessions.lock().unwrap().insert(id.clone(), handle.clone());
    let workbench = state.workbench.clone();
    std::thread::spawn(move || {
        let mut io = ServerIo {
            handle: handle.clone(),
            lines: rx,
        };
        run_session(&workbench, &mut io);
        handle.close();
    });
    (StatusCode::CREATED, Json(Created { session_id: id }))
}

#[derive(Deserialize)]
struct Message {
    text: String,
}

async fn post_message(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Json(msg): Json<Message>,
) -> Result<StatusCode, ApiError> {
    let handle = state.session(&id)?;
    let sent = handle
        .lines
        .lock()
        .unwrap()
        .as_ref()
        .is_some_and(|tx| tx.send(msg.text).is_ok());
    if sent {
        Ok(StatusCode::ACCEPTED)
    } else {
        Err(ApiError(StatusCode::GONE, format!("session {id} is closed")))
    }
}

#[derive(Deserialize)]
struct EventsQuery {
    #[serde(default)]
    after: usize,
    #[serde(default)]
    wait_ms: u64,
}

#[derive(Serialize)]
struct EventPage {
    events: Vec<IndexedEvent>,
    next: usize,
    closed: bool,
}

async fn get_events(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
) -> Result<Json<EventPage>, ApiError> {
    let handle = state.session(&id)?;
    let mut rx = handle.count.subscribe();
    let deadline = tokio::time::Instant::now() + Duration::from_millis(q.wait_ms.min(MAX_WAIT_MS));
    loop {
        let events = handle.since(q.after);
        if !events.is_empty() || handle.is_closed() || tokio::time::Instant::now() >= deadline {
            let next = q.after + events.len();
            return Ok(Json(EventPage {
                events,
                next,
                closed: handle.is_closed(),
            }));
        }
        if tokio::time::timeout_at(deadline, rx.changed()).await.is_err() {
            continue;
        }
    }
}

async fn stream_events(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<EventsQuery>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let handle = state.session(&id)?;
    let rx = handle.count.subscribe();
    let start = (handle, rx, q.after, VecDeque::new());
    let stream = futures::stream::unfold(start, |(handle, mut rx, mut next, mut pending)| async move {
        loop {
            if let Some(ev) = pending.pop_front() {
                let ev: IndexedEvent = ev;
                let data = serde_json::to_string(&ev).expect("event serializes");
                let sse = Event::default().event(ev.event.kind()).id(ev.seq.to_string()).data(data);
                return Some((Ok(sse), (handle, rx, next, pending)));
            }
            let fresh = handle.since(next);
            if !fresh.is_empty() {
                next += fresh.len();
                pending.extend(fresh);
                continue;
            }
            if handle.is_closed() || rx.changed().await.is_err() {
                return None;
            }
        }
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let handle = state
        .sessions
        .lock()
        .unwrap()
        .remove(&id)
        .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("unknown session {id}")))?;
    handle.lines.lock().unwrap().take();
    Ok(StatusCode::NO_CONTENT)
}

fn content_type(path: &FsPath) -> &'static str {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => "application/json",
        Some("svg") => "image/svg+xml",
        Some("csv") => "text/csv; charset=utf-8",
        Some("tex") => "text/x-tex; charset=utf-8",
        _ => "application/octet-stream",
    }
}

async fn bundle_file(state: &AppState, request_id: &str, rel: &str) -> Result<Response, ApiError> {
    let not_found = || ApiError(StatusCode::NOT_FOUND, format!("no bundle file {request_id}/{rel}"));
    if !is_request_id(request_id) {
        return Err(not_found());
    }
    let rel_path = FsPath::new(rel);
    if rel.is_empty() || !rel_path.components().all(|c| matches!(c, Component::Normal(_))) {
        return Err(ApiError(StatusCode::BAD_REQUEST, format!("invalid path {rel}")));
    }
    let path = state.workbench.config().output_dir.join(request_id).join(rel_path);
    let bytes = tokio::fs::read(&path).await.map_err(|_| not_found())?;
    Ok(([(header::CONTENT_TYPE, content_type(&path))], bytes).into_response())
}

async fn get_bundle(State(state): State<AppState>, Path(request_id): Path<String>) -> Result<Response, ApiError> {
    bundle_file(&state, &request_id, BUNDLE_INDEX).await
}

async fn get_bundle_file(
    State(state): State<AppState>,
    Path((request_id, rel)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    bundle_file(&state, &request_id, &rel).await
}

async fn health() -> &'static str {
    "ok"
}

pub fn router(workbench: Arc<Workbench>) -> Router {
    let state = AppState {
        workbench,
        sessions: Arc::new(Mutex::new(HashMap::new())),
        next_id: Arc::new(AtomicU64::new(1)),
    };
    Router::new()
        .route("/health", get(health))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", axum::routing::delete(delete_session))
        .route("/sessions/{id}/messages", post(post_message))
        .route("/sessions/{id}/events", get(get_events))
        .route("/sessions/{id}/stream", get(stream_events))
        .route("/bundles/{request_id}", get(get_bundle))
        .route("/bundles/{request_id}/{*path}", get(get_bundle_file))
        .with_state(state)
}

/// Serves on an already bound listener until the task is dropped.
pub async fn serve_on(listener: TcpListener, workbench: Arc<Workbench>) -> Result<(), SessionError> {
    let addr = listener.local_addr().map_err(|e| SessionError::Startup(e.to_string()))?;
    axum::serve(listener, router(workbench))
        .await
        .map_err(|e| SessionError::Startup(format!("{addr}: {e}")))
}

/// Binds `config.bind:config.port` and serves.
pub async fn serve(config: WorkbenchConfig) -> Result<(), SessionError> {
    let addr = format!("{}:{}", config.bind, config.port);
    let workbench = Arc::new(Workbench::open(config)?);
    let listener = TcpListener::bind(&addr)
        .await
        .map_err(|e| SessionError::Startup(format!("cannot listen on {addr}: {e}")))?;
    serve_on(listener, workbench).await
}
