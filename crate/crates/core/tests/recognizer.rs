use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use skate_core::eval::parse_corpus;
use skate_core::fixtures;
use skate_core::ontology::{FrameDef, Ontology, PartOfSpeech, RoleKind, RoleSpec};
use skate_core::recognizer::{
    correction::ingest, CorrectionLog, CorrectionRecord, ParseResponse, Recognizer,
    RecognizerConfig, Source, StaticParser, WireInterpretation,
};
use skate_core::text::CharSpan;
use skate_testkit::recognizer::{best_roles, frame_vector, greedy_roles, rank_frames};

const COOKIE: &str = "The child takes the cookie from the jar";

fn span_text(text: &str, s: CharSpan) -> &str {
    s.slice(text)
}

#[test]
fn cookie_sentence_end_to_end() {
    let rec = fixtures::recognizer();
    let tokens = rec.analyze(COOKIE);
    let trigger = rec.select_trigger(&tokens).unwrap();
    assert_eq!(trigger.lemma, "take");
    let spans = rec.detect_spans(&tokens, &trigger).spans;
    let texts: Vec<&str> = spans.iter().map(|s| span_text(COOKIE, *s)).collect();
    assert_eq!(texts, ["The child", "the cookie", "from the jar"]);

    let top = rec.parse(COOKIE, None).remove(0);
    assert_eq!(top.frame_id, "taking");
    assert_eq!(top.source, Source::Knn);
    let roles: BTreeMap<&str, &str> = top
        .role_bindings
        .iter()
        .map(|(r, s)| (r.as_str(), span_text(COOKIE, *s)))
        .collect();
    assert_eq!(
        roles,
        BTreeMap::from([
            ("agent", "The child"),
            ("source", "from the jar"),
            ("theme", "the cookie")
        ])
    );
}

#[test]
fn cookie_greedy_is_optimal() {
    let rec = fixtures::recognizer();
    let tokens = rec.analyze(COOKIE);
    let trigger = rec.select_trigger(&tokens).unwrap();
    let spans = rec.detect_spans(&tokens, &trigger).spans;
    let cands = rec
        .role_candidates("taking", &tokens, trigger.span, &spans)
        .unwrap();
    let floor = rec.config().role_similarity_floor;
    let greedy = rec
        .assign_roles("taking", &tokens, trigger.span, &spans)
        .unwrap();
    let (best, _) = best_roles(&cands, floor);
    assert_eq!(greedy, best);
}

#[test]
fn get_senses_for_the_player_sentences() {
    let rec = fixtures::recognizer();
    let top = |t: &str| rec.parse(t, None).remove(0).frame_id;
    assert_eq!(top("A player gets to the goal"), "arriving-at-a-location");
    assert_eq!(top("A player gets a ball"), "acquire");
    assert_eq!(top("A player gets into trouble"), "transition-to-state");
    let tokens = rec.analyze("a player gets to the goal");
    assert_eq!(rec.select_trigger(&tokens).unwrap().lemma, "get");
    let all: Vec<String> = rec
        .parse("a player gets", None)
        .into_iter()
        .map(|i| i.frame_id)
        .collect();
    assert_eq!(all.len(), 3);
}

#[test]
fn no_trigger_no_interpretation() {
    let rec = fixtures::recognizer();
    assert!(rec.select_trigger(&rec.analyze("the of and")).is_none());
    assert!(rec.parse("", None).is_empty());
    assert!(rec.parse("zzz qqq", None).is_empty());
}

#[test]
fn ranking_matches_brute_force_on_every_fixture_sentence() {
    let rec = fixtures::recognizer();
    let corpus = parse_corpus(fixtures::EVAL_CORPUS).unwrap();
    let extra = fixtures::corpus_lines();
    let texts = corpus.iter().map(|e| e.text.clone()).chain(extra);
    for text in texts {
        let tokens = rec.analyze(&text);
        let Some(trigger) = rec.select_trigger(&tokens) else {
            continue;
        };
        let got = rec.rank_frames(&tokens, &trigger, usize::MAX).unwrap();
        let expect = rank_frames(&rec, &tokens, &trigger.lemma);
        assert_eq!(got.len(), expect.len(), "{text}");
        for ((gf, gs), (ef, es)) in got.iter().zip(&expect) {
            assert!((gs - es).abs() < 1e-9, "{text}: {gf} {gs} vs {ef} {es}");
        }
        assert_eq!(got[0].0, expect[0].0, "{text}");
    }
}

#[test]
fn greedy_matches_reference_on_every_fixture_sentence() {
    let rec = fixtures::recognizer();
    let floor = rec.config().role_similarity_floor;
    for ex in parse_corpus(fixtures::EVAL_CORPUS).unwrap() {
        let tokens = rec.analyze(&ex.text);
        let Some(trigger) = rec.select_trigger(&tokens) else {
            continue;
        };
        let spans = rec.detect_spans(&tokens, &trigger).spans;
        for (frame, _) in rec.rank_frames(&tokens, &trigger, 3).unwrap() {
            let f = rec.ontology().frame(&frame).unwrap();
            if f.pos == Some(PartOfSpeech::Conj) || f.builtin.is_some() {
                continue;
            }
            let cands = rec
                .role_candidates(&frame, &tokens, trigger.span, &spans)
                .unwrap();
            let got = rec
                .assign_roles(&frame, &tokens, trigger.span, &spans)
                .unwrap();
            assert_eq!(got, greedy_roles(&cands, floor), "{} / {frame}", ex.text);
        }
    }
}

#[test]
fn ranking_needs_supported_frames() {
    let rec = fixtures::recognizer();
    let tokens = rec.analyze("gets");
    let trigger = rec.select_trigger(&tokens).unwrap();
    // "get" itself has a vector; an all-OOV sentence needs a bare store
    let store = skate_core::embedding::EmbeddingStore::from_vectors(
        [(
            "zzz".to_string(),
            skate_core::embedding::Vector(vec![1.0; rec.store().dimension()]),
        )],
        Default::default(),
    )
    .unwrap();
    let bare = Recognizer::new(
        rec.ontology().clone(),
        Arc::new(store),
        RecognizerConfig::default(),
    );
    assert!(
        bare.rank_frames(&tokens, &trigger, 3).is_err(),
        "frames with no support are excluded"
    );
    let ranked = rec.rank_frames(&tokens, &trigger, 1).unwrap();
    assert_eq!(ranked.len(), 1);
}

fn tie_ontology() -> Ontology {
    let role = |name: &str, kind, fillers: &[&str]| RoleSpec {
        name: name.into(),
        kind,
        type_hint: None,
        example_fillers: fillers.iter().map(|f| f.to_string()).collect(),
    };
    Ontology::from_frames(vec![FrameDef {
        id: "pick".into(),
        gloss: String::new(),
        pos: Some(PartOfSpeech::Verb),
        builtin: None,
        trigger_lemmas: vec!["take".into()],
        parents: Vec::new(),
        roles: vec![
            role("focal", RoleKind::Focal, &[]),
            role("beta", RoleKind::Required, &["the cookie"]),
            role("alpha", RoleKind::Required, &["the cookie"]),
        ],
        examples: Vec::new(),
    }])
    .unwrap()
}

#[test]
fn equal_scores_go_to_the_smaller_role_name() {
    let base = fixtures::recognizer();
    let rec = Recognizer::new(
        Arc::new(tie_ontology()),
        base.store().clone(),
        RecognizerConfig::default(),
    );
    let text = "take the cookie";
    let tokens = rec.analyze(text);
    let trigger = rec.select_trigger(&tokens).unwrap();
    let spans = rec.detect_spans(&tokens, &trigger).spans;
    assert_eq!(spans.len(), 1);
    let roles = rec
        .assign_roles("pick", &tokens, trigger.span, &spans)
        .unwrap();
    assert_eq!(roles.keys().collect::<Vec<_>>(), ["alpha"]);
    assert!(rec
        .assign_roles("pick", &tokens, trigger.span, &[])
        .unwrap()
        .is_empty());
}

#[test]
fn unrelated_frame_does_not_move_rankings() {
    let rec = fixtures::recognizer();
    let mut frames = rec.ontology().frames().to_vec();
    frames.push(FrameDef {
        id: "zebra-crossing".into(),
        gloss: String::new(),
        pos: Some(PartOfSpeech::Noun),
        builtin: None,
        trigger_lemmas: vec!["crosswalk".into()],
        parents: Vec::new(),
        roles: vec![RoleSpec {
            name: "focal".into(),
            kind: RoleKind::Focal,
            type_hint: None,
            example_fillers: vec![],
        }],
        examples: Vec::new(),
    });
    let wider = Recognizer::new(
        Arc::new(Ontology::from_frames(frames).unwrap()),
        rec.store().clone(),
        *rec.config(),
    );
    for ex in parse_corpus(fixtures::EVAL_CORPUS).unwrap() {
        assert_eq!(rec.parse(&ex.text, None), wider.parse(&ex.text, None));
    }
}

fn wire(frame: &str, confidence: f64) -> WireInterpretation {
    WireInterpretation {
        frame: frame.into(),
        trigger: CharSpan::new(10, 15),
        roles: BTreeMap::from([("agent".to_string(), CharSpan::new(0, 9))]),
        confidence,
    }
}

#[test]
fn external_results_pass_through_when_confident() {
    let rec = fixtures::recognizer();
    let ext = StaticParser {
        response: Some(ParseResponse {
            interpretations: vec![wire("taking", 0.99)],
        }),
    };
    let out = rec.parse(COOKIE, Some(&ext));
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].source, Source::External);
    assert_eq!(out[0].confidence, 0.99);
    assert_eq!(out[0].frame_id, "taking");
}

#[test]
fn fallback_engages_on_empty_low_malformed_or_down() {
    let rec = fixtures::recognizer();
    let cases = [
        StaticParser {
            response: Some(ParseResponse {
                interpretations: vec![],
            }),
        },
        StaticParser {
            response: Some(ParseResponse {
                interpretations: vec![wire("taking", 0.2)],
            }),
        },
        StaticParser {
            response: Some(ParseResponse {
                interpretations: vec![wire("no-such-frame", 0.9)],
            }),
        },
        StaticParser { response: None },
    ];
    for ext in cases {
        let out = rec.parse(COOKIE, Some(&ext));
        assert!(!out.is_empty());
        assert!(out.iter().all(|i| i.source == Source::Knn));
        assert_eq!(out[0].frame_id, "taking");
    }
}

#[test]
fn corrections_are_logged_and_reingested() {
    let dir = tempfile::tempdir().unwrap();
    let log = CorrectionLog::new(dir.path().join("corrections.ndjson"));
    assert!(log.read_all().unwrap().is_empty());
    let rec = fixtures::recognizer();
    let text = "If a player gets to the goal";
    let interps = rec.parse(text, None);
    let chosen = interps
        .iter()
        .find(|i| i.frame_id == "arriving-at-a-location")
        .unwrap();
    let rejected: Vec<String> = interps
        .iter()
        .filter(|i| i.frame_id != chosen.frame_id)
        .map(|i| i.frame_id.clone())
        .collect();
    let rec_ = CorrectionRecord::new(
        text,
        chosen,
        rejected.clone(),
        "2021-10-18T00:00:00Z".into(),
    )
    .unwrap();
    log.append(&rec_).unwrap();
    let back = log.read_all().unwrap();
    assert_eq!(back.len(), 1);
    let mut sorted = back[0].rejected.clone();
    sorted.sort();
    assert_eq!(sorted, ["acquire", "transition-to-state"]);
    assert!(
        CorrectionRecord::new(text, chosen, vec![chosen.frame_id.clone()], "t".into()).is_err()
    );

    // new support token changes the embedding, matching the oracle
    let onto = ingest(rec.ontology(), &back).unwrap();
    let grown = Recognizer::new(Arc::new(onto), rec.store().clone(), *rec.config());
    let before = rec.frame_embedding("arriving-at-a-location").unwrap();
    let after = grown.frame_embedding("arriving-at-a-location").unwrap();
    assert!(after.support_count >= before.support_count);
    let oracle = frame_vector(&grown, "arriving-at-a-location").unwrap();
    assert!(skate_testkit::embedding::approx_eq(
        after.vector.as_slice(),
        &oracle,
        1e-12
    ));
    assert_eq!(
        grown
            .ontology()
            .frame("arriving-at-a-location")
            .unwrap()
            .examples
            .len(),
        rec.ontology()
            .frame("arriving-at-a-location")
            .unwrap()
            .examples
            .len()
            + 1
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn interpretations_are_well_formed(words in proptest::collection::vec(
        prop_oneof![
            "[a-z]{1,8}",
            Just("takes".to_string()), Just("the".to_string()), Just("gets".to_string()),
            Just("and".to_string()), Just("not".to_string()), Just("from".to_string()),
            Just("player".to_string()), Just("cookie".to_string()), Just(",".to_string()),
            Just("in class".to_string()), Just("is greater than".to_string()),
        ], 0..12)) {
        let rec = fixtures::recognizer();
        let text = words.join(" ");
        let len = text.chars().count();
        let out = rec.parse(&text, None);
        prop_assert_eq!(&out, &rec.parse(&text, None));
        prop_assert!(out.len() <= rec.config().k);
        for i in &out {
            prop_assert!((0.0..=1.0).contains(&i.confidence));
            prop_assert!(i.trigger_span.start < i.trigger_span.end && i.trigger_span.end <= len);
            let roles = rec.ontology().resolve_roles(&i.frame_id).unwrap();
            let mut seen: Vec<CharSpan> = Vec::new();
            for (name, span) in &i.role_bindings {
                prop_assert!(roles.iter().any(|r| &r.name == name && !r.is_focal()));
                prop_assert!(span.start < span.end && span.end <= len);
                prop_assert!(!span.overlaps(&i.trigger_span));
                prop_assert!(seen.iter().all(|s| !s.overlaps(span)));
                seen.push(*span);
            }
        }
    }

    #[test]
    fn low_confidence_external_always_falls_back(conf in 0.0f64..0.35, text in "[a-z ]{0,30}") {
        let rec = fixtures::recognizer();
        let ext = StaticParser { response: Some(ParseResponse { interpretations: vec![WireInterpretation {
            frame: "taking".into(), trigger: CharSpan::new(0, 1), roles: BTreeMap::new(), confidence: conf,
        }] }) };
        let out = rec.parse(&format!("t{text}"), Some(&ext));
        prop_assert!(out.iter().all(|i| i.source == Source::Knn));
    }
}
