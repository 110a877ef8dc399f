#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::Value;
use skate_core::fixtures;
use skate_core::session::{FixedClock, SeededIds};
use skate_service::{router, AppState};
use tower::ServiceExt;

pub const CLOCK: &str = "2021-10-18T00:00:00Z";
pub const SCHEMA: &str = include_str!("../../schemas/api.schema.json");

pub fn state() -> AppState {
    AppState::new(
        Arc::new(fixtures::recognizer()),
        fixtures::policy_document(),
    )
    .unwrap()
    .with_clock(Arc::new(FixedClock(CLOCK.into())))
    .with_ids(Arc::new(SeededIds::new(7)))
    .with_corpus(fixtures::corpus_lines())
}

pub fn app() -> Router {
    router(Arc::new(state()))
}

pub struct Reply {
    pub status: StatusCode,
    pub content_type: String,
    pub text: String,
}

impl Reply {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.text).unwrap_or_else(|e| panic!("not JSON ({e}): {}", self.text))
    }
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> Reply {
    let mut req = Request::builder()
        .method(Method::from_bytes(method.as_bytes()).unwrap())
        .uri(uri);
    if body.is_some() {
        req = req.header("content-type", "application/json");
    }
    let req = req
        .body(body.map_or_else(Body::empty, |b| Body::from(b.to_string())))
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let content_type = resp
        .headers()
        .get("content-type")
        .map(|v| v.to_str().unwrap().to_string())
        .unwrap_or_default();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    Reply {
        status,
        content_type,
        text: String::from_utf8(bytes.to_vec()).unwrap(),
    }
}

/// Checks `value` against one definition of the published schema.
pub fn validate(def: &str, value: &Value) {
    let mut schema: Value = serde_json::from_str(SCHEMA).unwrap();
    assert!(
        schema["$defs"].get(def).is_some(),
        "no schema definition `{def}`"
    );
    schema["$ref"] = Value::String(format!("#/$defs/{def}"));
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator
        .iter_errors(value)
        .map(|e| format!("{} at {}", e, e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{def}: {errors:?}\n{value:#}");
}

/// The schema definition a successful response to `method uri` must match.
pub fn def_for(method: &str, uri: &str) -> &'static str {
    let path = uri.split('?').next().unwrap();
    let segs: Vec<&str> = path.trim_matches('/').split('/').collect();
    match (method, segs.as_slice()) {
        ("GET", ["healthz"]) => "health",
        ("POST", ["parse"]) => "parse",
        ("POST", ["sessions"]) | ("GET", ["sessions", _]) => "session",
        ("GET", ["sessions", _, "events"]) => "events",
        ("POST", ["sessions", _, "slots", _, "text" | "refine"]) => "options",
        ("POST", ["sessions", _, "slots", _, "sense"]) => "instance_response",
        ("POST", ["sessions", _, "slots", _, "leave" | "optional"])
        | ("DELETE", ["sessions", _, "slots", _]) => "slot_response",
        ("GET", ["sessions", _, "suggestions"]) => "suggestions",
        ("POST", ["sessions", _, "submit"]) | ("GET", ["sessions", _, "rules"]) => "rules",
        ("GET", ["policy"]) | ("POST", ["policy", "build"]) => "policy",
        ("POST", ["policy", "facts"]) => "world",
        ("GET", ["policy", "query"]) => "report",
        other => panic!("no schema mapping for {other:?}"),
    }
}

/// Calls the API and validates the JSON body against the schema.
pub async fn checked(app: &Router, method: &str, uri: &str, body: Option<&str>) -> Reply {
    let reply = call(app, method, uri, body).await;
    if reply.content_type.starts_with("application/json") {
        let def = if reply.status.is_success() {
            def_for(method, uri)
        } else {
            "error"
        };
        validate(def, &reply.json());
    }
    reply
}
