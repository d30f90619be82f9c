//! JSON API over a shared, immutable engine.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use logquest::pipeline::{AskOptions, Engine};
use serde::Deserialize;
use serde_json::json;

/// Response header carrying the engine's self-assessment.
pub const DIAGNOSTIC_HEADER: &str = "x-diagnostic";

/// Upper bound on per-request overrides, to keep one request from holding
/// the prover pool for long.
pub const MAX_ANSWERS: usize = 50;
pub const MAX_RELAX_LIMIT: usize = 8;

#[derive(Deserialize)]
struct AskRequest {
    question: Option<String>,
    answers: Option<usize>,
    max_relax: Option<usize>,
}

fn error(status: StatusCode, message: impl Into<String>) -> Response {
    (status, Json(json!({ "error": message.into() }))).into_response()
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/health", get(health))
        .route("/config", get(config))
        .route("/ask", post(ask))
        .with_state(engine)
}

async fn health(State(engine): State<Arc<Engine>>) -> Response {
    Json(json!({
        "status": "ok",
        "passages": engine.passages().len(),
        "background_clauses": engine.background().len(),
    }))
    .into_response()
}

async fn config(State(engine): State<Arc<Engine>>) -> Response {
    let c = engine.config();
    Json(json!({
        "top_k_passages": c.top_k_passages,
        "per_candidate_budget_ms": c.per_candidate_budget.as_millis() as u64,
        "max_relax": c.max_relax,
        "max_level": c.max_level,
        "max_branches": c.max_branches,
        "answers_returned": c.answers_returned,
        "question_budget_ms": c.question_budget.as_millis() as u64,
        "concurrency": c.concurrency,
        "latency_bound_ms": c.latency_bound().as_millis() as u64,
    }))
    .into_response()
}

async fn ask(State(engine): State<Arc<Engine>>, body: Bytes) -> Response {
    let request: AskRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return error(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")),
    };
    let Some(question) = request.question else {
        return error(StatusCode::BAD_REQUEST, "missing field: question");
    };
    if question.trim().is_empty() {
        return error(StatusCode::BAD_REQUEST, "empty question");
    }
    if request.answers.is_some_and(|n| n == 0 || n > MAX_ANSWERS) {
        return error(StatusCode::BAD_REQUEST, format!("answers must be in 1..={MAX_ANSWERS}"));
    }
    if request.max_relax.is_some_and(|n| n > MAX_RELAX_LIMIT) {
        return error(
            StatusCode::BAD_REQUEST,
            format!("max_relax must be at most {MAX_RELAX_LIMIT}"),
        );
    }
    let options = AskOptions {
        answers: request.answers,
        max_relax: request.max_relax,
    };

    let outcome = tokio::task::spawn_blocking(move || engine.ask(&question, &options)).await;
    match outcome {
        Ok(Ok(outcome)) => {
            let mut response = Json(outcome.records).into_response();
            if let Some(d) = outcome.diagnostic {
                response
                    .headers_mut()
                    .insert(DIAGNOSTIC_HEADER, HeaderValue::from_static(d.message()));
            }
            response
        }
        Ok(Err(e)) => error(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
        Err(_) => error(StatusCode::INTERNAL_SERVER_ERROR, "internal error"),
    }
}

pub async fn serve(engine: Arc<Engine>, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(engine))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
