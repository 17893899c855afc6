//! Data directory holding models and sessions in the same file formats the
//! CLI uses:
//!
//! ```text
//! <data>/models/<model_id>.ucm
//! <data>/sessions/<session_id>.json   (model_ref = ../models/<model_id>.ucm)
//! ```

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use chrono::{DateTime, Utc};
use nfr_core::dsl::parse_model_bytes;
use nfr_core::engine::{now_utc, start_session, EngineError, Session, Taxonomy};
use nfr_core::{auto_number_questions, load_model, load_session, save_session, validate_model, write_atomic};
use nfr_core::{Diagnostic, UseCaseModel};

use crate::error::ApiError;

#[derive(Debug)]
pub struct StoredModel {
    pub model_id: String,
    pub source: String,
    pub parsed: UseCaseModel,
    pub created_at: DateTime<Utc>,
}

struct SessionEntry {
    model_id: String,
    // writers hold this for the whole read-modify-persist cycle
    state: tokio::sync::RwLock<Session>,
}

pub struct Store {
    root: PathBuf,
    models: RwLock<HashMap<String, Arc<StoredModel>>>,
    sessions: RwLock<HashMap<String, Arc<SessionEntry>>>,
}

fn io_error(context: &str, e: std::io::Error) -> ApiError {
    ApiError::internal(format!("{context}: {e}"))
}

impl Store {
    /// Opens (creating if needed) a data directory and loads everything in
    /// it. Files that fail to load are skipped with a warning.
    pub fn open(root: impl Into<PathBuf>) -> std::io::Result<Self> {
        let root = root.into();
        fs::create_dir_all(root.join("models"))?;
        fs::create_dir_all(root.join("sessions"))?;
        let store = Self {
            root,
            models: RwLock::new(HashMap::new()),
            sessions: RwLock::new(HashMap::new()),
        };
        store.load_models()?;
        store.load_sessions()?;
        Ok(store)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn model_path(&self, model_id: &str) -> PathBuf {
        self.root.join("models").join(format!("{model_id}.ucm"))
    }

    fn session_path(&self, session_id: &str) -> PathBuf {
        self.root.join("sessions").join(format!("{session_id}.json"))
    }

    fn load_models(&self) -> std::io::Result<()> {
        let mut models = self.models.write().expect("model map lock");
        for entry in fs::read_dir(self.root.join("models"))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("ucm") {
                continue;
            }
            let Some(model_id) = path.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
                continue;
            };
            let source = fs::read_to_string(&path)?;
            match load_model(&source) {
                Ok(parsed) => {
                    let created_at = fs::metadata(&path)
                        .and_then(|m| m.modified())
                        .map(DateTime::<Utc>::from)
                        .unwrap_or_else(|_| now_utc());
                    models.insert(
                        model_id.clone(),
                        Arc::new(StoredModel {
                            model_id,
                            source,
                            parsed,
                            created_at,
                        }),
                    );
                }
                Err(_) => tracing::warn!(path = %path.display(), "skipping model that no longer parses"),
            }
        }
        Ok(())
    }

    fn load_sessions(&self) -> std::io::Result<()> {
        let models = self.models.read().expect("model map lock").clone();
        let mut sessions = self.sessions.write().expect("session map lock");
        for entry in fs::read_dir(self.root.join("sessions"))? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = fs::read_to_string(&path)?;
            let mut model_id = None;
            let loaded = load_session(&text, |model_ref: &str| {
                let id = Path::new(model_ref)
                    .file_stem()
                    .and_then(|s| s.to_str())
                    .unwrap_or_default()
                    .to_string();
                let found = models.get(&id).map(|m| m.parsed.clone());
                model_id = Some(id);
                found.ok_or("model is not in the data directory")
            });
            match (loaded, model_id) {
                (Ok(session), Some(model_id)) => {
                    sessions.insert(
                        session.session_id().to_string(),
                        Arc::new(SessionEntry {
                            model_id,
                            state: tokio::sync::RwLock::new(session),
                        }),
                    );
                }
                (Err(e), _) => tracing::warn!(path = %path.display(), error = %e, "skipping session"),
                (Ok(_), None) => unreachable!("resolver runs before a session is built"),
            }
        }
        Ok(())
    }

    /// Parses, numbers and stores a model. Returns its warnings on success
    /// and every diagnostic on failure.
    pub fn add_model(&self, source: &[u8]) -> Result<(Arc<StoredModel>, Vec<Diagnostic>), ApiError> {
        let parsed = parse_model_bytes(source).map_err(ApiError::diagnostics)?;
        let parsed = auto_number_questions(&parsed);
        let warnings = validate_model(&parsed);
        let source = String::from_utf8(source.to_vec()).expect("parser accepted it as UTF-8");
        let model_id = uuid::Uuid::new_v4().to_string();
        write_atomic(&self.model_path(&model_id), source.as_bytes()).map_err(|e| io_error("cannot store model", e))?;
        let stored = Arc::new(StoredModel {
            model_id: model_id.clone(),
            source,
            parsed,
            created_at: now_utc(),
        });
        self.models
            .write()
            .expect("model map lock")
            .insert(model_id, stored.clone());
        Ok((stored, warnings))
    }

    pub fn model(&self, model_id: &str) -> Result<Arc<StoredModel>, ApiError> {
        self.models
            .read()
            .expect("model map lock")
            .get(model_id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("unknown-model", format!("no model {model_id}")))
    }

    fn entry(&self, session_id: &str) -> Result<Arc<SessionEntry>, ApiError> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(session_id)
            .cloned()
            .ok_or_else(|| ApiError::not_found("unknown-session", format!("no session {session_id}")))
    }

    fn persist(&self, model_id: &str, session: &Session) -> Result<(), ApiError> {
        let text = save_session(session, &format!("../models/{model_id}.ucm"));
        write_atomic(&self.session_path(session.session_id()), text.as_bytes())
            .map_err(|e| io_error("cannot store session", e))
    }

    pub fn create_session(&self, model_id: &str, taxonomy: Option<Vec<String>>) -> Result<Session, ApiError> {
        let model = self.model(model_id)?;
        let taxonomy = taxonomy.map(Taxonomy::new).transpose()?;
        let session = start_session(model.parsed.clone(), taxonomy)?;
        self.persist(model_id, &session)?;
        self.sessions.write().expect("session map lock").insert(
            session.session_id().to_string(),
            Arc::new(SessionEntry {
                model_id: model_id.to_string(),
                state: tokio::sync::RwLock::new(session.clone()),
            }),
        );
        Ok(session)
    }

    /// A consistent copy of the session's current state.
    pub async fn snapshot(&self, session_id: &str) -> Result<Session, ApiError> {
        let entry = self.entry(session_id)?;
        let session = entry.state.read().await.clone();
        Ok(session)
    }

    /// Session file text, as the CLI would write it.
    pub async fn session_file(&self, session_id: &str) -> Result<String, ApiError> {
        let entry = self.entry(session_id)?;
        let session = entry.state.read().await;
        Ok(save_session(&session, &format!("../models/{}.ucm", entry.model_id)))
    }

    /// Applies `change` under the session's write lock and persists the
    /// result before publishing it. A failed change or write leaves the
    /// session untouched.
    pub async fn mutate<F>(&self, session_id: &str, change: F) -> Result<Session, ApiError>
    where
        F: FnOnce(&Session) -> Result<Session, EngineError>,
    {
        let entry = self.entry(session_id)?;
        let mut state = entry.state.write().await;
        let next = change(&state)?;
        self.persist(&entry.model_id, &next)?;
        *state = next.clone();
        Ok(next)
    }
}
