mod common;

use common::validate;
use serde_json::json;

#[test]
#[should_panic(expected = "session")]
fn session_without_root_is_rejected() {
    validate(
        "session",
        &json!({"id": "00", "created": "x", "last_event_seq": 1, "status": "editing", "focus": ""}),
    );
}

#[test]
#[should_panic(expected = "rules")]
fn rule_with_unknown_modality_is_rejected() {
    validate(
        "rules",
        &json!({"version": 1, "rules": [{"modality": "sometimes", "construction": "statement",
        "antecedents": [], "consequent": {"pred": "x", "args": {}}, "provenance": ""}]}),
    );
}

#[test]
#[should_panic(expected = "report")]
fn negative_days_are_rejected() {
    validate(
        "report",
        &json!({"asof": "2021-09-18", "world_version": 1,
        "statuses": [{"person": "a", "state": "quarantine", "days_remaining": -1}]}),
    );
}

#[test]
fn every_definition_compiles() {
    let schema: serde_json::Value = serde_json::from_str(common::SCHEMA).unwrap();
    for (name, def) in schema["$defs"].as_object().unwrap() {
        let mut s = schema.clone();
        s["$ref"] = json!(format!("#/$defs/{name}"));
        assert!(jsonschema::validator_for(&s).is_ok(), "{name}: {def}");
    }
}
