//! Client for a supervised frame parser running as an external service.
//!
//! Wire format: `POST {"text": "...", "trigger": [s, e] | null}` answered by
//! `{"interpretations": [{"frame", "trigger": [s, e], "roles": {name: [s, e]}, "confidence"}]}`.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::http::{JsonClient, EXTERNAL_TIMEOUT};
use crate::text::CharSpan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseRequest {
    pub text: String,
    pub trigger: Option<CharSpan>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireInterpretation {
    pub frame: String,
    pub trigger: CharSpan,
    #[serde(default)]
    pub roles: BTreeMap<String, CharSpan>,
    pub confidence: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ParseResponse {
    #[serde(default)]
    pub interpretations: Vec<WireInterpretation>,
}

pub trait ExternalParser: Send + Sync {
    fn interpret(&self, request: &ParseRequest) -> Result<ParseResponse, String>;
}

/// HTTP binding with a 2 s timeout.
#[derive(Debug, Clone)]
pub struct HttpParserClient {
    client: JsonClient,
}

impl HttpParserClient {
    pub fn new(url: impl Into<String>) -> Self {
        Self::with_timeout(url, EXTERNAL_TIMEOUT)
    }

    pub fn with_timeout(url: impl Into<String>, timeout: Duration) -> Self {
        HttpParserClient {
            client: JsonClient::new(url, timeout),
        }
    }
}

impl ExternalParser for HttpParserClient {
    fn interpret(&self, request: &ParseRequest) -> Result<ParseResponse, String> {
        self.client.post(request)
    }
}

/// Replays canned responses; used for deterministic tests and replays.
#[derive(Debug, Clone, Default)]
pub struct StaticParser {
    pub response: Option<ParseResponse>,
}

impl ExternalParser for StaticParser {
    fn interpret(&self, _request: &ParseRequest) -> Result<ParseResponse, String> {
        self.response
            .clone()
            .ok_or_else(|| "static parser unavailable".to_string())
    }
}
