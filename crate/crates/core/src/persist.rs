//! Session files.
//!
//! ```json
//! {
//!   "session_id": "…",
//!   "model_ref": "pos.ucm",
//!   "taxonomy": ["Performance", …],
//!   "answers": [
//!     {"question": "NFRQ1", "answer": "…", "category": "…", "actor": "…",
//!      "recorded_at": "2013-01-01T00:00:00Z"}
//!   ]
//! }
//! ```
//!
//! `model_ref` points at the DSL file, relative to the session file.

use std::io::{self, Write};
use std::path::Path;

use chrono::{DateTime, NaiveDateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{ElicitedNfr, EngineError, Session, Taxonomy};
use crate::model::{QuestionId, UseCaseModel};

const TIMESTAMP_FORMAT: &str = "%Y-%m-%dT%H:%M:%SZ";

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("session file does not match the schema: {0}")]
    Schema(String),
    #[error("cannot resolve model \"{model_ref}\": {message}")]
    Model { model_ref: String, message: String },
    #[error(transparent)]
    Invalid(#[from] EngineError),
}

impl LoadError {
    pub fn code(&self) -> &'static str {
        match self {
            LoadError::Schema(_) => "schema-violation",
            LoadError::Model { .. } => "unresolved-model",
            LoadError::Invalid(e) => e.code(),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SessionFile {
    session_id: String,
    model_ref: String,
    taxonomy: Vec<String>,
    answers: Vec<AnswerRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnswerRecord {
    question: String,
    answer: String,
    category: String,
    actor: String,
    recorded_at: String,
}

pub fn format_timestamp(at: &DateTime<Utc>) -> String {
    at.format(TIMESTAMP_FORMAT).to_string()
}

pub fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    NaiveDateTime::parse_from_str(s, TIMESTAMP_FORMAT)
        .ok()
        .map(|n| n.and_utc())
}

/// Pretty-printed JSON with a trailing newline.
pub fn save_session(session: &Session, model_ref: &str) -> String {
    let file = SessionFile {
        session_id: session.session_id().to_string(),
        model_ref: model_ref.to_string(),
        taxonomy: session.taxonomy().categories().to_vec(),
        answers: session
            .answers()
            .iter()
            .map(|a| AnswerRecord {
                question: a.question_id.to_string(),
                answer: a.answer.clone(),
                category: a.category.clone(),
                actor: a.actor.clone(),
                recorded_at: format_timestamp(&a.recorded_at),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("session file serializes");
    out.push('\n');
    out
}

/// Reads just the `model_ref` of a session file.
pub fn model_ref(text: &str) -> Result<String, LoadError> {
    parse_file(text).map(|f| f.model_ref)
}

fn parse_file(text: &str) -> Result<SessionFile, LoadError> {
    serde_json::from_str(text).map_err(|e| LoadError::Schema(e.to_string()))
}

/// Parses a session file and re-checks it against the model that
/// `resolve` returns for its `model_ref`.
pub fn load_session<F, E>(text: &str, resolve: F) -> Result<Session, LoadError>
where
    F: FnOnce(&str) -> Result<UseCaseModel, E>,
    E: std::fmt::Display,
{
    let file = parse_file(text)?;
    let model = resolve(&file.model_ref).map_err(|e| LoadError::Model {
        model_ref: file.model_ref.clone(),
        message: e.to_string(),
    })?;
    let taxonomy = Taxonomy::new(file.taxonomy)?;
    let mut answers = Vec::with_capacity(file.answers.len());
    for rec in file.answers {
        let question_id: QuestionId = rec
            .question
            .parse()
            .map_err(|_| EngineError::UnknownQuestion(rec.question.clone()))?;
        let recorded_at = parse_timestamp(&rec.recorded_at).ok_or_else(|| {
            LoadError::Schema(format!(
                "recorded_at \"{}\" is not an ISO-8601 UTC timestamp (YYYY-MM-DDTHH:MM:SSZ)",
                rec.recorded_at
            ))
        })?;
        answers.push(ElicitedNfr {
            question_id,
            answer: rec.answer,
            category: rec.category,
            actor: rec.actor,
            recorded_at,
        });
    }
    Ok(Session::restore(file.session_id, model, taxonomy, answers)?)
}

/// Writes through a temporary file in the same directory and renames it
/// over `path`, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_model;
    use crate::engine::{start_session, AnswerDraft};
    use chrono::TimeZone;
    use std::convert::Infallible;

    const SRC: &str = "model \"m\"\nactor \"User\"\nusecase \"Search\"\nassoc \"User\" -> \"Search\"\nquestion NFRQ1 on \"Search\": \"How fast?\"\nquestion NFRQ2 on \"Search\": \"How many ways?\"\n";

    fn model() -> UseCaseModel {
        parse_model(SRC).unwrap()
    }

    fn resolve(_: &str) -> Result<UseCaseModel, Infallible> {
        Ok(model())
    }

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn fresh_session_has_empty_answers() {
        let s = start_session(model(), None).unwrap();
        let text = save_session(&s, "m.ucm");
        let json: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(json["answers"], serde_json::json!([]));
        assert_eq!(json["model_ref"], "m.ucm");
        assert_eq!(load_session(&text, resolve).unwrap(), s);
    }

    #[test]
    fn key_order_and_timestamp_format() {
        let at = Utc.with_ymd_and_hms(2013, 1, 2, 3, 4, 5).unwrap();
        let s = start_session(model(), None)
            .unwrap()
            .record_answer_at(&AnswerDraft::new("NFRQ1", "Less than 10 second", "Performance"), at)
            .unwrap();
        let text = save_session(&s, "m.ucm");
        let keys = ["\"session_id\"", "\"model_ref\"", "\"taxonomy\"", "\"answers\""];
        let pos: Vec<_> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        let fields = ["\"question\"", "\"answer\"", "\"category\"", "\"actor\"", "\"recorded_at\""];
        let pos: Vec<_> = fields.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(text.contains("\"recorded_at\": \"2013-01-02T03:04:05Z\""));
        assert!(text.ends_with("}\n"));
        let back = load_session(&text, resolve).unwrap();
        assert_eq!(back, s);
        assert_eq!(save_session(&back, "m.ucm"), text);
    }

    fn with_answer(question: &str, category: &str, actor: &str, at: &str) -> String {
        format!(
            r#"{{"session_id":"s","model_ref":"m.ucm","taxonomy":["Performance"],
            "answers":[{{"question":"{question}","answer":"a","category":"{category}","actor":"{actor}","recorded_at":"{at}"}}]}}"#
        )
    }

    #[test]
    fn load_errors() {
        let code = |t: &str| load_session(t, resolve).unwrap_err().code();
        assert_eq!(code(&with_answer("NFRQ99", "Performance", "User", "2013-01-01T00:00:00Z")), "unknown-question");
        assert_eq!(code(&with_answer("NFRQ1", "Usability", "User", "2013-01-01T00:00:00Z")), "unknown-category");
        assert_eq!(code(&with_answer("NFRQ1", "Performance", "Ghost", "2013-01-01T00:00:00Z")), "unknown-actor");
        assert_eq!(code(&with_answer("NFRQ1", "Performance", "User", "yesterday")), "schema-violation");
        assert_eq!(code("{}"), "schema-violation");
        assert_eq!(code("not json"), "schema-violation");
        assert_eq!(
            code(r#"{"session_id":"s","model_ref":"m","taxonomy":[],"answers":[]}"#),
            "invalid-taxonomy"
        );
        let dup = r#"{"session_id":"s","model_ref":"m","taxonomy":["P"],"answers":[
            {"question":"NFRQ1","answer":"a","category":"P","actor":"User","recorded_at":"2013-01-01T00:00:00Z"},
            {"question":"NFRQ1","answer":"b","category":"P","actor":"User","recorded_at":"2013-01-01T00:00:00Z"}]}"#;
        assert_eq!(code(dup), "duplicate-answer");
        let err = load_session(&with_answer("NFRQ1", "Performance", "User", "2013-01-01T00:00:00Z"), |r: &str| {
            Err(format!("no such file {r}"))
        })
        .unwrap_err();
        assert_eq!(err.code(), "unresolved-model");
    }
}
