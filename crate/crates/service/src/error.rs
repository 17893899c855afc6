use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use nfr_core::{Diagnostic, EngineError};
use serde::Serialize;

/// Error body: `{"code": …, "message": …, "diagnostics": [...]}`.
/// Domain validation is 422, missing resources 404, malformed requests 400.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{status} {code}: {message}")]
pub struct ApiError {
    pub status: StatusCode,
    pub code: String,
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Serialize)]
struct Body<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "<[_]>::is_empty")]
    diagnostics: &'a [Diagnostic],
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            code: code.to_string(),
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    pub fn bad_request(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, code, message)
    }

    pub fn not_found(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }

    pub fn diagnostics(diagnostics: Vec<Diagnostic>) -> Self {
        let message = diagnostics
            .first()
            .map_or_else(|| "model is invalid".to_string(), |d| d.message.clone());
        Self {
            status: StatusCode::UNPROCESSABLE_ENTITY,
            code: "invalid-model".to_string(),
            message,
            diagnostics,
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match e {
            EngineError::UnknownQuestion(_) | EngineError::NotAnswered(_) => StatusCode::NOT_FOUND,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        let mut err = ApiError::new(status, e.code(), e.to_string());
        if let EngineError::InvalidModel(diags) = e {
            err.diagnostics = diags;
        }
        err
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = Body {
            code: &self.code,
            message: &self.message,
            diagnostics: &self.diagnostics,
        };
        (self.status, Json(body)).into_response()
    }
}
