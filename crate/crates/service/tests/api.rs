use std::sync::Arc;

use axum::body::Body;
use axum::http::{header, Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use nfr_service::{router, Store};
use nfr_testkit::{dot, fixture};
use serde_json::{json, Value};
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    content_type: String,
    body: String,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_str(&self.body).unwrap_or_else(|e| panic!("{e}: {}", self.body))
    }
}

async fn call(app: &Router, method: Method, uri: &str, body: impl Into<Body>) -> Reply {
    let request = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
    let response = app.clone().oneshot(request).await.unwrap();
    let status = response.status();
    let content_type = response
        .headers()
        .get(header::CONTENT_TYPE)
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        body: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

async fn get(app: &Router, uri: &str) -> Reply {
    call(app, Method::GET, uri, Body::empty()).await
}

async fn put_answer(app: &Router, session: &str, question: &str, body: Value) -> Reply {
    call(app, Method::PUT, &format!("/sessions/{session}/answers/{question}"), body.to_string()).await
}

fn app(dir: &std::path::Path) -> Router {
    router(Arc::new(Store::open(dir).unwrap()))
}

async fn upload(app: &Router, model: &str) -> String {
    let reply = call(app, Method::POST, "/models", fixture(model)).await;
    assert_eq!(reply.status, StatusCode::CREATED, "{}", reply.body);
    reply.json()["model_id"].as_str().unwrap().to_string()
}

async fn new_session(app: &Router, model_id: &str) -> String {
    let reply = call(app, Method::POST, "/sessions", json!({ "model_id": model_id }).to_string()).await;
    assert_eq!(reply.status, StatusCode::CREATED, "{}", reply.body);
    reply.json()["session_id"].as_str().unwrap().to_string()
}

fn answer_rows(name: &str) -> Vec<[String; 4]> {
    let text = fixture(name);
    csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| {
            let r = r.unwrap();
            [r[0].to_string(), r[1].to_string(), r[2].to_string(), r[3].to_string()]
        })
        .collect()
}

async fn answer_all(app: &Router, session: &str, csv_name: &str) {
    for [q, answer, category, actor] in answer_rows(csv_name) {
        let reply = put_answer(app, session, &q, json!({ "answer": answer, "category": category, "actor": actor })).await;
        assert_eq!(reply.status, StatusCode::OK, "{q}: {}", reply.body);
    }
}

#[tokio::test]
async fn model_upload_reports_warnings_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());

    let reply = call(&app, Method::POST, "/models", fixture("pos.ucm")).await;
    assert_eq!(reply.status, StatusCode::CREATED);
    let warnings = reply.json()["warnings"].as_array().unwrap().clone();
    assert_eq!(warnings.iter().filter(|w| w["code"] == "fr-without-nfrq").count(), 16);

    let bad = "model \"M\"\nusecase \"U\"\nusecase \"U\"\nquestion NFRQ1 on \"V\": \"q\"\n";
    let reply = call(&app, Method::POST, "/models", bad).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    let codes: Vec<_> = reply.json()["diagnostics"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["code"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(codes, ["duplicate-use-case", "undeclared-use-case"]);

    let reply = call(&app, Method::POST, "/models", vec![b'm', 0xff, b'\n']).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["diagnostics"][0]["code"], "invalid-utf8");
}

#[tokio::test]
async fn model_resource_and_questions_diagram() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = upload(&app, "pos.ucm").await;

    let model = get(&app, &format!("/models/{id}")).await.json();
    assert_eq!(model["name"], "POS");
    assert_eq!(model["actors"].as_array().unwrap().len(), 6);
    assert_eq!(model["use_cases"].as_array().unwrap().len(), 20);
    assert_eq!(model["questions"][0]["id"], "NFRQ1");
    assert_eq!(model["source"], fixture("pos.ucm"));

    let reply = get(&app, &format!("/models/{id}/diagram")).await;
    assert_eq!(reply.status, StatusCode::OK);
    assert_eq!(reply.content_type, "text/vnd.graphviz");
    let graph = dot::parse(&reply.body).unwrap();
    assert_eq!(graph.nodes.len(), 40);

    let reply = get(&app, &format!("/models/{id}/diagram?view=categorized")).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);
    assert_eq!(get(&app, "/models/nope").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn session_creation_errors() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let id = upload(&app, "pos.ucm").await;

    let reply = call(&app, Method::POST, "/sessions", "{not json").await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);
    let reply = call(&app, Method::POST, "/sessions", json!({ "model_id": "missing" }).to_string()).await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
    let reply = call(
        &app,
        Method::POST,
        "/sessions",
        json!({ "model_id": id, "taxonomy": ["Cost", "Cost"] }).to_string(),
    )
    .await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["code"], "invalid-taxonomy");

    let reply = call(
        &app,
        Method::POST,
        "/sessions",
        json!({ "model_id": id, "taxonomy": ["Cost", "Reliability"] }).to_string(),
    )
    .await;
    assert_eq!(reply.status, StatusCode::CREATED);
    assert_eq!(reply.json()["taxonomy"], json!(["Cost", "Reliability"]));
    assert_eq!(get(&app, "/sessions/missing/pending").await.status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn answer_errors_map_to_status_codes() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos.ucm").await).await;

    let reply = put_answer(&app, &session, "NFRQ1", json!({ "answer": "fast", "category": "Reliability" })).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["code"], "unknown-category");

    let reply = put_answer(&app, &session, "NFRQ99", json!({ "answer": "fast", "category": "Performance" })).await;
    assert_eq!(reply.status, StatusCode::NOT_FOUND);
    assert_eq!(reply.json()["code"], "unknown-question");

    let reply = put_answer(&app, &session, "NFRQ1", json!({ "answer": "  ", "category": "Performance" })).await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["code"], "blank-answer");

    let reply = put_answer(
        &app,
        &session,
        "NFRQ1",
        json!({ "answer": "fast", "category": "Performance", "actor": "Staff" }),
    )
    .await;
    assert_eq!(reply.status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(reply.json()["code"], "actor-not-associated");

    let reply = put_answer(&app, &session, "NFRQ1", json!({ "text": "fast" })).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);

    let file = get(&app, &format!("/sessions/{session}")).await.json();
    assert_eq!(file["answers"], json!([]));
}

#[tokio::test]
async fn put_upserts_and_delete_retracts_once() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos.ucm").await).await;

    let reply = put_answer(&app, &session, "NFRQ1", json!({ "answer": "Less than 10 second", "category": "Performance" })).await;
    assert_eq!(reply.status, StatusCode::OK);
    let body = reply.json();
    assert_eq!(body["actor"], "User");
    assert_eq!(body["question"], "NFRQ1");

    let reply = put_answer(&app, &session, "NFRQ1", json!({ "answer": "Under 5 seconds", "category": "Performance" })).await;
    assert_eq!(reply.status, StatusCode::OK);
    let table = get(&app, &format!("/sessions/{session}/table")).await.json();
    assert_eq!(table.as_array().unwrap().len(), 1);
    assert_eq!(table[0]["answer"], "Under 5 seconds");
    assert_eq!(get(&app, &format!("/sessions/{session}/pending")).await.json().as_array().unwrap().len(), 6);

    let uri = format!("/sessions/{session}/answers/NFRQ1");
    assert_eq!(call(&app, Method::DELETE, &uri, Body::empty()).await.status, StatusCode::NO_CONTENT);
    let second = call(&app, Method::DELETE, &uri, Body::empty()).await;
    assert_eq!(second.status, StatusCode::NOT_FOUND);
    assert_eq!(second.json()["code"], "not-answered");
    assert_eq!(get(&app, &format!("/sessions/{session}/pending")).await.json().as_array().unwrap().len(), 7);
}

#[tokio::test]
async fn full_session_checklist_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos-full.ucm").await).await;
    answer_all(&app, &session, "pos-full-answers.csv").await;

    let md = get(&app, &format!("/sessions/{session}/checklist?format=md")).await;
    assert_eq!(md.status, StatusCode::OK);
    assert_eq!(md.content_type, "text/markdown; charset=utf-8");
    assert_eq!(md.body, fixture("table2.golden.md"));

    let json = get(&app, &format!("/sessions/{session}/checklist")).await;
    assert_eq!(json.content_type, "application/json");
    let cells = json.json()["cells"].clone();
    let checked = cells.as_array().unwrap().iter().flat_map(|r| r.as_array().unwrap()).filter(|c| **c == json!(true)).count();
    assert_eq!(checked, 32);

    let csv = get(&app, &format!("/sessions/{session}/checklist?format=csv")).await;
    assert_eq!(csv.content_type, "text/csv; charset=utf-8");
    let marks: usize = csv::Reader::from_reader(csv.body.as_bytes())
        .records()
        .map(|r| r.unwrap().iter().skip(1).filter(|c| *c == "x").count())
        .sum();
    assert_eq!(marks, 32);

    let coverage = get(&app, &format!("/sessions/{session}/coverage")).await.json();
    assert_eq!(coverage["unanswered_questions"], json!([]));

    let bad = get(&app, &format!("/sessions/{session}/table?format=pdf")).await;
    assert_eq!(bad.status, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn table1_through_the_api() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos.ucm").await).await;
    answer_all(&app, &session, "pos-answers.csv").await;
    let md = get(&app, &format!("/sessions/{session}/table?format=markdown")).await;
    assert_eq!(md.body, fixture("table1.golden.md"));
}

#[tokio::test]
async fn session_diagram_and_suggestions() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos.ucm").await).await;
    answer_all(&app, &session, "pos-answers.csv").await;

    let reply = get(&app, &format!("/sessions/{session}/diagram")).await;
    assert_eq!(reply.content_type, "text/vnd.graphviz");
    let graph = dot::parse(&reply.body).unwrap();
    assert_eq!(graph.nodes_with_shape("folder").len(), 3);

    let reply = get(&app, &format!("/sessions/{session}/diagram?view=questions&rankdir=TB")).await;
    let graph = dot::parse(&reply.body).unwrap();
    assert_eq!(graph.graph_attrs["rankdir"], "TB");
    assert_eq!(graph.nodes_with_shape("folder").len(), 0);

    let reply = get(&app, &format!("/sessions/{session}/diagram?rankdir=XY")).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);

    let reply = get(&app, &format!("/sessions/{session}/suggest?text=Less%20than%2010%20second")).await;
    let ranked = reply.json();
    assert_eq!(ranked.as_array().unwrap().len(), 7);
    assert_eq!(ranked[0]["category"], "Performance");
    assert_eq!(ranked[0]["score"], 1.0);
}

#[tokio::test]
async fn state_survives_a_restart() {
    let dir = tempfile::tempdir().unwrap();
    let (session, before) = {
        let app = app(dir.path());
        let session = new_session(&app, &upload(&app, "pos.ucm").await).await;
        answer_all(&app, &session, "pos-answers.csv").await;
        let uri = format!("/sessions/{session}/answers/NFRQ4");
        assert_eq!(call(&app, Method::DELETE, &uri, Body::empty()).await.status, StatusCode::NO_CONTENT);
        let before = get(&app, &format!("/sessions/{session}")).await.body;
        (session, before)
    };
    let app = app(dir.path());
    let after = get(&app, &format!("/sessions/{session}")).await;
    assert_eq!(after.status, StatusCode::OK);
    assert_eq!(after.body, before);
    assert_eq!(after.json()["answers"].as_array().unwrap().len(), 6);
    let on_disk = std::fs::read_to_string(dir.path().join("sessions").join(format!("{session}.json"))).unwrap();
    assert_eq!(on_disk, before);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_writes_are_serialized() {
    let dir = tempfile::tempdir().unwrap();
    let app = app(dir.path());
    let session = new_session(&app, &upload(&app, "pos-full.ucm").await).await;

    let mut tasks = Vec::new();
    for [q, answer, category, actor] in answer_rows("pos-full-answers.csv") {
        let (app, session) = (app.clone(), session.clone());
        tasks.push(tokio::spawn(async move {
            put_answer(&app, &session, &q, json!({ "answer": answer, "category": category, "actor": actor }))
                .await
                .status
        }));
    }
    // competing writers on a single question: the last one wins, nothing is lost
    for i in 0..16 {
        let (app, session) = (app.clone(), session.clone());
        tasks.push(tokio::spawn(async move {
            put_answer(&app, &session, "NFRQ8", json!({ "answer": format!("variant {i}"), "category": "Security" }))
                .await
                .status
        }));
    }
    for t in tasks {
        assert_eq!(t.await.unwrap(), StatusCode::OK);
    }
    let file = get(&app, &format!("/sessions/{session}")).await;
    let answers = file.json()["answers"].as_array().unwrap().clone();
    assert_eq!(answers.len(), 32);
    let on_disk = std::fs::read_to_string(dir.path().join("sessions").join(format!("{session}.json"))).unwrap();
    assert_eq!(on_disk, file.body);
    let rows = answer_rows("pos-full-answers.csv");
    for a in &answers {
        let row = rows.iter().find(|r| a["question"] == r[0].as_str()).unwrap();
        if row[0] == "NFRQ8" {
            let text = a["answer"].as_str().unwrap();
            assert!(text.starts_with("variant ") || text == row[1]);
        } else {
            assert_eq!((a["answer"].as_str().unwrap(), a["category"].as_str().unwrap()), (row[1].as_str(), row[2].as_str()));
        }
    }
}
