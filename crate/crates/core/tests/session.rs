use std::sync::Arc;

use proptest::prelude::*;
use skate_core::fixtures;
use skate_core::session::{
    all_paths, open_required, Command, Engine, FixedClock, Session, SessionError, SessionEvent,
    SlotState, Status,
};
use skate_testkit::scripts::{self, Step};

fn engine() -> Engine {
    Engine::new(Arc::new(fixtures::recognizer()))
        .with_clock(Arc::new(FixedClock("2021-10-18T00:00:00Z".into())))
}

fn state_text(s: &Session, path: &str) -> Option<String> {
    s.slot(path)
        .and_then(|slot| slot.state.text())
        .map(String::from)
}

#[test]
fn cookie_flow() {
    let e = engine();
    let mut s = e.start("c", "statement").unwrap();
    assert_eq!(s.focus, "statement");
    let opts = e.input_text(&mut s, "statement", scripts::COOKIE).unwrap();
    assert_eq!(opts[0].frame, "taking");
    assert!(!opts[0].gloss.is_empty());
    let inst = e.choose_sense(&mut s, "statement", "taking").unwrap();
    assert_eq!(inst.frame_id, "taking");
    assert_eq!(inst.trigger_text, "takes");
    let names: Vec<&str> = inst.slots.iter().map(|s| s.name.as_str()).collect();
    assert_eq!(names, ["agent", "theme", "source"]);
    assert_eq!(
        state_text(&s, "statement.agent").as_deref(),
        Some("The child")
    );
    assert_eq!(
        state_text(&s, "statement.theme").as_deref(),
        Some("the cookie")
    );
    assert_eq!(
        state_text(&s, "statement.source").as_deref(),
        Some("from the jar")
    );
    assert!(open_required(&s.root).is_empty());
    e.submit(&mut s).unwrap();
    assert_eq!(s.status, Status::Submitted);
    assert_eq!(s.seq, s.log.len() as u64);
}

#[test]
fn submitted_sessions_are_frozen() {
    let e = engine();
    let mut s = scripts::run(&e, "c", &scripts::cookie()).unwrap();
    e.submit(&mut s).unwrap();
    let before = s.clone();
    assert_eq!(
        e.input_text(&mut s, "statement.agent", "x"),
        Err(SessionError::SessionClosed)
    );
    assert_eq!(
        e.refine(&mut s, "statement.agent"),
        Err(SessionError::SessionClosed)
    );
    assert_eq!(
        e.leave_unstructured(&mut s, "statement.agent"),
        Err(SessionError::SessionClosed)
    );
    assert_eq!(
        e.delete_optional_slot(&mut s, "statement.source"),
        Err(SessionError::SessionClosed)
    );
    assert_eq!(e.submit(&mut s), Err(SessionError::SessionClosed));
    assert_eq!(s, before);
    assert_eq!(s.log, before.log);
}

#[test]
fn submit_lists_open_slots() {
    let e = engine();
    let mut s = e.start("q", "if_then").unwrap();
    e.input_text(&mut s, "then", "person2 thanks person1")
        .unwrap();
    match e.submit(&mut s) {
        Err(SessionError::IncompleteEntry(open)) => assert_eq!(open, ["if", "then"]),
        other => panic!("{other:?}"),
    }
    assert_eq!(s.status, Status::Editing);
}

#[test]
fn errors_leave_the_session_alone() {
    let e = engine();
    let mut s = scripts::run(&e, "c", &scripts::cookie()).unwrap();
    let before = s.clone();
    assert!(matches!(
        e.input_text(&mut s, "nope", "x"),
        Err(SessionError::BadPath(_))
    ));
    assert!(matches!(
        e.input_text(&mut s, "statement..agent", "x"),
        Err(SessionError::BadPath(_))
    ));
    assert!(matches!(
        e.choose_sense(&mut s, "statement.agent", "taking"),
        Err(SessionError::OptionNotOffered { .. })
    ));
    assert_eq!(
        e.delete_optional_slot(&mut s, "statement.agent"),
        Err(SessionError::RequiredSlot("statement.agent".into()))
    );
    assert!(matches!(
        e.add_optional_slot(&mut s, "statement", "agent"),
        Err(SessionError::UnknownRole { .. })
    ));
    assert!(matches!(
        e.start("x", "limerick"),
        Err(SessionError::UnknownTemplate(_))
    ));
    assert_eq!(s, before);
    assert_eq!(s.log, before.log);
}

#[test]
fn optional_slots_come_and_go() {
    let e = engine();
    let mut s = e.start("q", "compliance_state").unwrap();
    let opts = e
        .input_text(&mut s, "state", "The student must quarantine for 14 days")
        .unwrap();
    assert_eq!(opts[0].frame, "quarantine");
    e.choose_sense(&mut s, "state", "quarantine").unwrap();
    assert_eq!(
        state_text(&s, "state.duration").as_deref(),
        Some("for 14 days")
    );
    let had_population = s.slot("state.population").is_some();
    e.delete_optional_slot(&mut s, "state.duration").unwrap();
    assert!(s.slot("state.duration").is_none());
    if had_population {
        assert_eq!(
            e.add_optional_slot(&mut s, "state", "population"),
            Err(SessionError::SlotExists("state.population".into()))
        );
        e.delete_optional_slot(&mut s, "state.population").unwrap();
    }
    e.add_optional_slot(&mut s, "state", "population").unwrap();
    assert_eq!(s.focus, "state.population");
    e.add_optional_slot(&mut s, "state", "duration").unwrap();
    assert_eq!(
        all_paths(&s.root),
        [
            "state",
            "state.person",
            "state.duration",
            "state.population"
        ]
    );
    assert_eq!(s.slot("state.population").unwrap().state, SlotState::Empty);
    assert_eq!(
        e.add_optional_slot(&mut s, "state", "person"),
        Err(SessionError::UnknownRole {
            frame: "quarantine".into(),
            role: "person".into()
        })
    );
}

#[test]
fn leave_and_refine() {
    let e = engine();
    let mut s = e.start("q", "statement").unwrap();
    e.input_text(&mut s, "statement", "zzz qqq").unwrap();
    assert!(matches!(
        s.slot("statement").unwrap().state,
        SlotState::Unstructured {
            is_final: false,
            ..
        }
    ));
    // nothing to choose, so the entry is still open
    e.leave_unstructured(&mut s, "statement").unwrap();
    assert!(matches!(
        s.slot("statement").unwrap().state,
        SlotState::Unstructured { is_final: true, .. }
    ));
    e.submit(&mut s).unwrap();
}

#[test]
fn replay_reconstructs_every_script() {
    let e = engine();
    let mut all = vec![scripts::cookie()];
    all.extend(scripts::commonsense_rules());
    for (i, script) in all.iter().enumerate() {
        let mut s = scripts::run(&e, &format!("s{i}"), script).unwrap();
        e.submit(&mut s).unwrap();
        let back = e.replay(&s.log).unwrap();
        assert_eq!(back, s, "{}", script.target);
        // the log survives a serialization round trip
        let wire: Vec<String> = s
            .log
            .iter()
            .map(|ev| serde_json::to_string(ev).unwrap())
            .collect();
        let parsed: Vec<SessionEvent> = wire
            .iter()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        assert_eq!(e.replay(&parsed).unwrap(), s);
    }
}

#[test]
fn replay_rejects_bad_logs() {
    let e = engine();
    let s = scripts::run(&e, "c", &scripts::cookie()).unwrap();
    assert!(matches!(e.replay(&[]), Err(SessionError::BadLog(_))));
    assert!(matches!(
        e.replay(&s.log[1..]),
        Err(SessionError::BadLog(_))
    ));
    let mut gap = s.log.clone();
    gap.remove(1);
    assert!(matches!(e.replay(&gap), Err(SessionError::BadLog(_))));
    let mut restart = s.log.clone();
    restart.push(SessionEvent {
        session: "c".into(),
        seq: s.seq + 1,
        command: s.log[0].command.clone(),
        ts: "t".into(),
    });
    assert!(matches!(e.replay(&restart), Err(SessionError::BadLog(_))));
    assert!(matches!(s.log[0].command, Command::Start { .. }));
}

#[test]
fn pending_options_are_ontology_frames() {
    let e = engine();
    let mut s = e.start("p", "if_then").unwrap();
    let opts = e.input_text(&mut s, "if", "a player gets").unwrap();
    let mut frames: Vec<&str> = opts.iter().map(|o| o.frame.as_str()).collect();
    frames.sort();
    assert_eq!(
        frames,
        ["acquire", "arriving-at-a-location", "transition-to-state"]
    );
    for o in &opts {
        assert!(e.ontology().contains(&o.frame));
        assert_eq!(o.interpretation.frame_id, o.frame);
    }
}

fn random_step(paths: &[String], pick: usize, kind: u8, frames: &[String], texts: &[&str]) -> Step {
    let path = paths
        .get(pick % paths.len().max(1))
        .cloned()
        .unwrap_or_default();
    match kind % 6 {
        0 => Step::Text {
            path,
            text: texts[pick % texts.len()].to_string(),
        },
        1 => Step::Refine { path },
        2 => Step::Choose {
            path,
            frame: frames[pick % frames.len()].clone(),
        },
        3 => Step::Leave { path },
        4 => Step::Delete { path },
        _ => Step::AddOptional {
            path,
            role: ["source", "duration", "population", "place", "other"][pick % 5].into(),
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_edits_keep_invariants(
        template in prop::sample::select(vec!["if_then", "after_then", "statement", "compliance_state",
                                              "intermediate_state", "policy_branch", "world_fact"]),
        ops in prop::collection::vec((any::<usize>(), any::<u8>()), 0..24),
    ) {
        let e = engine();
        let frames: Vec<String> = e.ontology().frames().iter().map(|f| f.id.clone()).collect();
        let texts = [scripts::COOKIE, "a player gets", "The student must quarantine for 14 days",
                     "person1 helps person2", "zzz", "", "Mary and Bobby were in class"];
        let mut s = e.start("f", template).unwrap();
        for (pick, kind) in ops {
            let paths = all_paths(&s.root);
            let step = random_step(&paths, pick, kind, &frames, &texts);
            let before = s.clone();
            match scripts::apply(&e, &mut s, &step) {
                Ok(()) => prop_assert_eq!(s.seq, before.seq + 1),
                Err(_) => {
                    prop_assert_eq!(&s, &before);
                    prop_assert_eq!(&s.log, &before.log);
                }
            }
            prop_assert_eq!(s.seq, s.log.len() as u64);
            for p in all_paths(&s.root) {
                if let SlotState::PendingDialogue { options, .. } = &s.slot(&p).unwrap().state {
                    prop_assert!(!options.is_empty());
                    prop_assert!(options.iter().all(|o| e.ontology().contains(&o.frame)));
                }
            }
        }
        let replayed = e.replay(&s.log).unwrap();
        prop_assert_eq!(&replayed, &s);
        let open = open_required(&s.root);
        let submitted = e.submit(&mut s);
        prop_assert_eq!(submitted.is_ok(), open.is_empty());
    }
}
