//! API errors and their HTTP mapping.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use skate_core::converter::ConvertError;
use skate_core::policy::PolicyError;
use skate_core::session::SessionError;
use skate_core::suggest::SuggestError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBody {
    pub error: &'static str,
    pub message: String,
    /// Slots that block a submit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<String>>,
    /// The session's current sequence number on a conflict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected_seq: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, error: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                error,
                message: message.into(),
                paths: None,
                expected_seq: None,
            },
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "invalid_request", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    pub fn conflict(expected: u64, got: u64) -> Self {
        let mut e = Self::new(
            StatusCode::CONFLICT,
            "sequence_conflict",
            format!("request was made at seq {got}, session is at {expected}"),
        );
        e.body.expected_seq = Some(expected);
        e
    }

    pub fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let msg = e.to_string();
        match e {
            SessionError::BadPath(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_path", msg),
            SessionError::SessionClosed => {
                ApiError::new(StatusCode::CONFLICT, "session_closed", msg)
            }
            SessionError::IncompleteEntry(paths) => {
                let mut err = ApiError::new(StatusCode::BAD_REQUEST, "incomplete_entry", msg);
                err.body.paths = Some(paths);
                err
            }
            SessionError::UnknownTemplate(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "unknown_template", msg)
            }
            SessionError::OptionNotOffered { .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, "option_not_offered", msg)
            }
            SessionError::RequiredSlot(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "required_slot", msg)
            }
            SessionError::UnknownRole { .. } => {
                ApiError::new(StatusCode::BAD_REQUEST, "unknown_role", msg)
            }
            SessionError::SlotExists(_) => {
                ApiError::new(StatusCode::BAD_REQUEST, "slot_exists", msg)
            }
            SessionError::BadLog(_) => ApiError::internal(msg),
        }
    }
}

impl From<SuggestError> for ApiError {
    fn from(e: SuggestError) -> Self {
        let msg = e.to_string();
        match e {
            SuggestError::GeneratorUnavailable(_) => ApiError::new(
                StatusCode::SERVICE_UNAVAILABLE,
                "generator_unavailable",
                msg,
            ),
            SuggestError::ZeroRequested => ApiError::bad_request(msg),
            SuggestError::BadPath(_) => ApiError::new(StatusCode::NOT_FOUND, "unknown_path", msg),
        }
    }
}

impl From<ConvertError> for ApiError {
    fn from(e: ConvertError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "conversion_failed", e.to_string())
    }
}

impl From<PolicyError> for ApiError {
    fn from(e: PolicyError) -> Self {
        ApiError::new(StatusCode::BAD_REQUEST, "policy_error", e.to_string())
    }
}
