//! Read-only JSON service over a [`Session`].

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{Query, State};
use axum::http::header::CONTENT_TYPE;
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use pervol_core::json::ErrorJson;
use pervol_core::ErrorKind;
use serde::Deserialize;
use tokio::net::TcpListener;
use tower_http::cors::{AllowOrigin, CorsLayer};
use tower_http::services::ServeDir;

use crate::session::{Engine, Failure, Outcome, Session};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramQuery {
    degree: usize,
    #[serde(default)]
    include_zero: bool,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TreeQuery {
    #[serde(default)]
    include_zero: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VolumeRequest {
    death_index: usize,
    radius: Option<f64>,
}

pub fn status(kind: ErrorKind) -> StatusCode {
    match kind {
        ErrorKind::Input => StatusCode::BAD_REQUEST,
        ErrorKind::Unsupported => StatusCode::UNPROCESSABLE_ENTITY,
        ErrorKind::Numerical | ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

fn respond(outcome: Outcome) -> Response {
    match outcome {
        Ok(body) => ([(CONTENT_TYPE, "application/json")], body.to_string()).into_response(),
        Err(f) => {
            let body = ErrorJson { error: f.message.clone(), kind: f.kind_name().to_string() };
            let text = serde_json::to_string(&body).expect("error JSON");
            (status(f.kind), [(CONTENT_TYPE, "application/json")], text).into_response()
        }
    }
}

async fn blocking(session: Arc<Session>, job: impl FnOnce(&Session) -> Outcome + Send + 'static) -> Response {
    match tokio::task::spawn_blocking(move || job(&session)).await {
        Ok(outcome) => respond(outcome),
        Err(e) => respond(Err(Failure { kind: ErrorKind::Internal, message: format!("worker failed: {e}") })),
    }
}

async fn meta(State(s): State<Arc<Session>>) -> Response {
    blocking(s, Session::meta).await
}

async fn points(State(s): State<Arc<Session>>) -> Response {
    blocking(s, Session::points).await
}

async fn diagram(State(s): State<Arc<Session>>, q: Result<Query<DiagramQuery>, QueryRejection>) -> Response {
    match q {
        Ok(Query(q)) => blocking(s, move |s| s.diagram(q.degree, Engine::Auto, q.include_zero)).await,
        Err(e) => respond(Err(Failure::input(e.body_text()))),
    }
}

async fn tree(State(s): State<Arc<Session>>, q: Result<Query<TreeQuery>, QueryRejection>) -> Response {
    match q {
        Ok(Query(q)) => blocking(s, move |s| s.tree(q.include_zero)).await,
        Err(e) => respond(Err(Failure::input(e.body_text()))),
    }
}

async fn volume(State(s): State<Arc<Session>>, body: Result<Json<VolumeRequest>, JsonRejection>) -> Response {
    match body {
        Ok(Json(r)) => blocking(s, move |s| s.volume(r.death_index, r.radius, None)).await,
        Err(e) => respond(Err(Failure::input(e.body_text()))),
    }
}

/// `http(s)://localhost`, `127.0.0.1` or `[::1]`, any port.
pub fn is_local_origin(origin: &HeaderValue) -> bool {
    let Ok(origin) = origin.to_str() else { return false };
    let Some(rest) = origin.strip_prefix("http://").or_else(|| origin.strip_prefix("https://")) else {
        return false;
    };
    let host = match rest.strip_prefix("[::1]") {
        Some(tail) => return tail.is_empty() || is_port(tail),
        None => rest.split_once(':').map_or(rest, |(h, _)| h),
    };
    let tail = &rest[host.len()..];
    matches!(host, "localhost" | "127.0.0.1") && (tail.is_empty() || is_port(tail))
}

fn is_port(tail: &str) -> bool {
    tail.strip_prefix(':').is_some_and(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()))
}

pub fn router(session: Arc<Session>, ui: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|origin, _| is_local_origin(origin)))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([CONTENT_TYPE]);
    let mut app = Router::new()
        .route("/meta", get(meta))
        .route("/diagram", get(diagram))
        .route("/tree", get(tree))
        .route("/points", get(points))
        .route("/volume", post(volume));
    if let Some(dir) = ui {
        app = app.nest_service("/ui", ServeDir::new(dir));
    }
    app.layer(cors).with_state(session)
}

pub async fn serve(listener: TcpListener, app: Router) -> std::io::Result<()> {
    axum::serve(listener, app).await
}

pub async fn bind(port: u16) -> std::io::Result<(TcpListener, SocketAddr)> {
    let listener = TcpListener::bind(SocketAddr::from(([127, 0, 0, 1], port))).await?;
    let addr = listener.local_addr()?;
    Ok((listener, addr))
}
