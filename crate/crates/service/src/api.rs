use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use nfr_core::diagram::{export_diagram, DiagramOptions, RankDir, View};
use nfr_core::engine::{now_utc, AnswerDraft, ElicitedNfr};
use nfr_core::persist::format_timestamp;
use nfr_core::report::{render_report, Format, ReportKind};
use nfr_core::{suggest_category, NfrQuestion, QuestionId};

use crate::error::ApiError;
use crate::store::Store;

pub const DOT_CONTENT_TYPE: &str = "text/vnd.graphviz";

type Params = Query<HashMap<String, String>>;

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/models", post(create_model))
        .route("/models/{id}", get(get_model))
        .route("/models/{id}/diagram", get(model_diagram))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/pending", get(pending))
        .route("/sessions/{id}/answers/{question}", put(put_answer).delete(delete_answer))
        .route("/sessions/{id}/table", get(table))
        .route("/sessions/{id}/checklist", get(checklist))
        .route("/sessions/{id}/coverage", get(coverage))
        .route("/sessions/{id}/diagram", get(session_diagram))
        .route("/sessions/{id}/suggest", get(suggest))
        .with_state(store)
}

fn parse_json<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed-request", e.to_string()))
}

fn text_response(content_type: &str, body: String) -> Response {
    ([(header::CONTENT_TYPE, content_type.to_string())], body).into_response()
}

#[derive(Serialize)]
struct QuestionView<'a> {
    id: String,
    use_case: &'a str,
    text: &'a str,
}

fn question_view(q: &NfrQuestion) -> QuestionView<'_> {
    QuestionView {
        id: q.id.to_string(),
        use_case: &q.use_case,
        text: &q.text,
    }
}

#[derive(Serialize)]
struct AnswerView<'a> {
    question: String,
    answer: &'a str,
    category: &'a str,
    actor: &'a str,
    recorded_at: String,
}

fn answer_view(a: &ElicitedNfr) -> AnswerView<'_> {
    AnswerView {
        question: a.question_id.to_string(),
        answer: &a.answer,
        category: &a.category,
        actor: &a.actor,
        recorded_at: format_timestamp(&a.recorded_at),
    }
}

async fn create_model(State(store): State<Arc<Store>>, body: Bytes) -> Response {
    match store.add_model(&body) {
        Ok((stored, warnings)) => (
            StatusCode::CREATED,
            Json(json!({ "model_id": stored.model_id, "warnings": warnings })),
        )
            .into_response(),
        Err(e) if e.status == StatusCode::UNPROCESSABLE_ENTITY => {
            (e.status, Json(json!({ "diagnostics": e.diagnostics }))).into_response()
        }
        Err(e) => e.into_response(),
    }
}

async fn get_model(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let stored = store.model(&id)?;
    let m = &stored.parsed;
    let associations: Vec<_> = m
        .associations
        .iter()
        .map(|(a, u)| json!({ "actor": a, "use_case": u }))
        .collect();
    let questions: Vec<_> = m.questions.iter().map(question_view).collect();
    Ok(Json(json!({
        "model_id": stored.model_id,
        "name": m.name,
        "source": stored.source,
        "actors": m.actors,
        "use_cases": m.use_cases,
        "associations": associations,
        "questions": questions,
        "created_at": format_timestamp(&stored.created_at),
    }))
    .into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewSession {
    model_id: String,
    #[serde(default)]
    taxonomy: Option<Vec<String>>,
}

async fn create_session(State(store): State<Arc<Store>>, body: Bytes) -> Result<Response, ApiError> {
    let req: NewSession = parse_json(&body)?;
    let session = store.create_session(&req.model_id, req.taxonomy)?;
    Ok((
        StatusCode::CREATED,
        Json(json!({
            "session_id": session.session_id(),
            "taxonomy": session.taxonomy().categories(),
        })),
    )
        .into_response())
}

async fn get_session(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let text = store.session_file(&id).await?;
    Ok(text_response("application/json", text))
}

async fn pending(State(store): State<Arc<Store>>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = store.snapshot(&id).await?;
    let pending: Vec<_> = session.pending_questions().into_iter().map(question_view).collect();
    Ok(Json(pending).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerBody {
    answer: String,
    category: String,
    #[serde(default)]
    actor: Option<String>,
}

async fn put_answer(
    State(store): State<Arc<Store>>,
    Path((id, question)): Path<(String, String)>,
    body: Bytes,
) -> Result<Response, ApiError> {
    let req: AnswerBody = parse_json(&body)?;
    let draft = AnswerDraft {
        question: question.clone(),
        answer: req.answer,
        category: req.category,
        actor: req.actor,
    };
    let at = now_utc();
    let session = store.mutate(&id, |s| s.upsert_answer_at(&draft, at)).await?;
    let qid: QuestionId = question.parse().expect("upsert accepted the id");
    let answer = session.answer(qid).expect("answer was just stored");
    Ok(Json(answer_view(answer)).into_response())
}

async fn delete_answer(
    State(store): State<Arc<Store>>,
    Path((id, question)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    store.mutate(&id, |s| s.retract_answer(&question)).await?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

fn format_param(params: &HashMap<String, String>) -> Result<Format, ApiError> {
    params
        .get("format")
        .map_or(Ok(Format::Json), |f| f.parse())
        .map_err(|e: String| ApiError::bad_request("bad-format", e))
}

async fn table(store: State<Arc<Store>>, id: Path<String>, params: Params) -> Result<Response, ApiError> {
    report(store, id, params, ReportKind::Table).await
}

async fn checklist(store: State<Arc<Store>>, id: Path<String>, params: Params) -> Result<Response, ApiError> {
    report(store, id, params, ReportKind::Checklist).await
}

async fn coverage(store: State<Arc<Store>>, id: Path<String>, params: Params) -> Result<Response, ApiError> {
    report(store, id, params, ReportKind::Coverage).await
}

async fn report(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(params): Params,
    kind: ReportKind,
) -> Result<Response, ApiError> {
    let format = format_param(&params)?;
    let session = store.snapshot(&id).await?;
    let body = render_report(&session, kind, format);
    Ok(text_response(format.content_type(), body))
}

fn diagram_options(params: &HashMap<String, String>, default_view: View) -> Result<DiagramOptions, ApiError> {
    let mut options = DiagramOptions {
        view: default_view,
        ..DiagramOptions::default()
    };
    if let Some(v) = params.get("view") {
        options.view = v.parse().map_err(|e: String| ApiError::bad_request("bad-view", e))?;
    }
    if let Some(v) = params.get("include_unanswered") {
        options.include_unanswered = match v.as_str() {
            "true" | "1" => true,
            "false" | "0" => false,
            other => {
                return Err(ApiError::bad_request(
                    "bad-parameter",
                    format!("include_unanswered must be true or false, got `{other}`"),
                ))
            }
        };
    }
    if let Some(v) = params.get("rankdir") {
        options.rankdir = match v.as_str() {
            "LR" => RankDir::LeftRight,
            "TB" => RankDir::TopBottom,
            other => {
                return Err(ApiError::bad_request(
                    "bad-parameter",
                    format!("rankdir must be LR or TB, got `{other}`"),
                ))
            }
        };
    }
    Ok(options)
}

async fn model_diagram(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(params): Params,
) -> Result<Response, ApiError> {
    let options = diagram_options(&params, View::Questions)?;
    let stored = store.model(&id)?;
    let dot = export_diagram(&stored.parsed, None, &options)
        .map_err(|e| ApiError::bad_request("session-required", e.to_string()))?;
    Ok(text_response(DOT_CONTENT_TYPE, dot))
}

async fn session_diagram(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(params): Params,
) -> Result<Response, ApiError> {
    let options = diagram_options(&params, View::Categorized)?;
    let session = store.snapshot(&id).await?;
    let dot = export_diagram(session.model(), Some(&session), &options).expect("session supplied");
    Ok(text_response(DOT_CONTENT_TYPE, dot))
}

async fn suggest(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    Query(params): Params,
) -> Result<Response, ApiError> {
    let session = store.snapshot(&id).await?;
    let text = params.get("text").map(String::as_str).unwrap_or_default();
    Ok(Json(suggest_category(text, session.taxonomy())).into_response())
}
