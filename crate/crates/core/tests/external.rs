//! The HTTP clients against a local stub server.

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::time::Duration;

use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use skate_core::fixtures;
use skate_core::recognizer::{ExternalParser, HttpParserClient, ParseRequest, Source};
use skate_core::suggest::{Generator, HttpGenerator, SuggestError};
use skate_core::text::CharSpan;

fn serve(router: Router) -> SocketAddr {
    let (tx, rx) = std::sync::mpsc::channel();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Builder::new_current_thread()
            .enable_all()
            .build()
            .unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router).await.unwrap();
        });
    });
    rx.recv().unwrap()
}

async fn parse_stub(Json(req): Json<Value>) -> Json<Value> {
    let text = req["text"].as_str().unwrap_or_default();
    if text.contains("garbage") {
        return Json(json!({"nonsense": true}));
    }
    Json(json!({"interpretations": [
        {"frame": "taking", "trigger": [10, 15], "roles": {"agent": [0, 9], "theme": [16, 26]}, "confidence": 0.97}
    ]}))
}

async fn generate_stub(Json(req): Json<Value>) -> Json<Value> {
    let n = req["n"].as_u64().unwrap_or(0) as usize;
    let all = [("to the goal", 0.9), ("a ball", 0.5), ("into trouble", 0.2)];
    let completions: Vec<Value> = all
        .iter()
        .take(n)
        .map(|(t, s)| json!({"text": t, "score": s}))
        .collect();
    Json(json!({ "completions": completions }))
}

#[test]
fn parser_over_http() {
    let addr = serve(Router::new().route("/parse", post(parse_stub)));
    let client = HttpParserClient::new(format!("http://{addr}/parse"));
    let resp = client
        .interpret(&ParseRequest {
            text: "The child takes the cookie".into(),
            trigger: None,
        })
        .unwrap();
    assert_eq!(resp.interpretations.len(), 1);
    assert_eq!(resp.interpretations[0].trigger, CharSpan::new(10, 15));
    assert_eq!(
        resp.interpretations[0].roles,
        BTreeMap::from([
            ("agent".to_string(), CharSpan::new(0, 9)),
            ("theme".to_string(), CharSpan::new(16, 26)),
        ])
    );

    let rec = fixtures::recognizer();
    let out = rec.parse("The child takes the cookie", Some(&client));
    assert_eq!(out[0].source, Source::External);
    // a malformed body falls back to the local reading
    let out = rec.parse("The child takes the garbage", Some(&client));
    assert!(out.iter().all(|i| i.source == Source::Knn));
}

#[test]
fn parser_down_falls_back() {
    let client =
        HttpParserClient::with_timeout("http://127.0.0.1:9/parse", Duration::from_millis(300));
    assert!(client
        .interpret(&ParseRequest {
            text: "x".into(),
            trigger: None
        })
        .is_err());
    let rec = fixtures::recognizer();
    let out = rec.parse("The child takes the cookie from the jar", Some(&client));
    assert_eq!(out[0].frame_id, "taking");
    assert_eq!(out[0].source, Source::Knn);
}

#[test]
fn generator_over_http() {
    let addr = serve(Router::new().route("/generate", post(generate_stub)));
    let gen = HttpGenerator::new(format!("http://{addr}/generate"));
    let got = gen.generate("If a player gets", 2).unwrap();
    assert_eq!(
        got.iter().map(|c| c.text.as_str()).collect::<Vec<_>>(),
        ["to the goal", "a ball"]
    );
    assert_eq!(got[0].full_text, "If a player gets to the goal");
    assert_eq!(gen.generate("x", 0), Err(SuggestError::ZeroRequested));

    let down =
        HttpGenerator::with_timeout("http://127.0.0.1:9/generate", Duration::from_millis(300));
    assert!(matches!(
        down.generate("x", 3),
        Err(SuggestError::GeneratorUnavailable(_))
    ));
}
