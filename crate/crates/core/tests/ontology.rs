use proptest::prelude::*;
use skate_core::fixtures;
use skate_core::ontology::{
    parse_ontology, FrameDef, Ontology, OntologyError, PartOfSpeech, RoleKind, RoleSpec,
};

fn role(name: &str, kind: RoleKind) -> RoleSpec {
    RoleSpec {
        name: name.into(),
        kind,
        type_hint: None,
        example_fillers: Vec::new(),
    }
}

fn frame(id: &str, parents: &[&str], trigger: &str) -> FrameDef {
    FrameDef {
        id: id.into(),
        gloss: String::new(),
        pos: Some(PartOfSpeech::Verb),
        builtin: None,
        trigger_lemmas: vec![trigger.into()],
        parents: parents.iter().map(|p| p.to_string()).collect(),
        roles: if parents.is_empty() {
            vec![role("focal", RoleKind::Focal)]
        } else {
            Vec::new()
        },
        examples: Vec::new(),
    }
}

#[test]
fn fixture_round_trips() {
    let onto = fixtures::ontology();
    let again = parse_ontology(&onto.to_json()).unwrap();
    assert_eq!(onto, again);
    assert_eq!(again.to_json(), onto.to_json());
}

#[test]
fn every_trigger_finds_its_frame() {
    let onto = fixtures::ontology();
    for f in onto.frames() {
        for t in &f.trigger_lemmas {
            assert!(
                onto.lookup_triggers(t).contains(&f.id),
                "{} not under {t}",
                f.id
            );
        }
    }
}

#[test]
fn exactly_one_focal_role_everywhere() {
    let onto = fixtures::ontology();
    for f in onto.frames() {
        let focal = onto
            .resolve_roles(&f.id)
            .unwrap()
            .iter()
            .filter(|r| r.is_focal())
            .count();
        assert_eq!(focal, 1, "{}", f.id);
    }
}

#[test]
fn second_focal_is_a_load_error() {
    let mut f = frame("a", &[], "a");
    f.roles.push(role("other-focal", RoleKind::Focal));
    assert!(matches!(
        Ontology::from_frames(vec![f]),
        Err(OntologyError::Validation(_))
    ));
}

#[test]
fn subsumption_is_a_partial_order_on_the_fixture() {
    let onto = fixtures::ontology();
    let ids: Vec<&str> = onto.frames().iter().map(|f| f.id.as_str()).collect();
    let sub = |a: &str, b: &str| onto.subsumes(a, b).unwrap();
    for &a in &ids {
        assert!(sub(a, a));
        for &b in &ids {
            if a != b && sub(a, b) {
                assert!(!sub(b, a), "{a} and {b} subsume each other");
            }
            if !sub(a, b) {
                continue;
            }
            for &c in &ids {
                if sub(b, c) {
                    assert!(sub(a, c), "{a} > {b} > {c} but not {a} > {c}");
                }
            }
        }
    }
    assert!(sub("event", "arriving-at-a-location"));
    assert!(sub("motion", "arriving-at-a-location"));
    assert!(!sub("arriving-at-a-location", "event"));
}

#[test]
fn unknown_frame_is_an_error() {
    let onto = fixtures::ontology();
    assert!(matches!(
        onto.subsumes("event", "nope"),
        Err(OntologyError::UnknownFrame(_))
    ));
    assert!(matches!(
        onto.resolve_roles("nope"),
        Err(OntologyError::UnknownFrame(_))
    ));
}

prop_compose! {
    /// A random DAG: frame i may only inherit from frames with smaller
    /// index.
    fn dag()(n in 1usize..12)(parents in proptest::collection::vec(proptest::collection::vec(any::<prop::sample::Index>(), 0..3), n)) -> Vec<FrameDef> {
        parents.iter().enumerate().map(|(i, ps)| {
            let mut chosen: Vec<String> = if i == 0 { Vec::new() } else { ps.iter().map(|ix| format!("f{}", ix.index(i))).collect() };
            chosen.sort();
            chosen.dedup();
            let mut f = frame(&format!("f{i}"), &[], &format!("t{}", i % 4));
            f.parents = chosen;
            if !f.parents.is_empty() {
                f.roles.clear();
            }
            f.roles.push(role(&format!("r{i}"), RoleKind::Optional));
            f
        }).collect()
    }
}

proptest! {
    #[test]
    fn random_dags_round_trip_and_order(frames in dag()) {
        let onto = Ontology::from_frames(frames).unwrap();
        let back = parse_ontology(&onto.to_json()).unwrap();
        prop_assert_eq!(&onto, &back);
        let ids: Vec<String> = onto.frames().iter().map(|f| f.id.clone()).collect();
        for a in &ids {
            prop_assert!(onto.subsumes(a, a).unwrap());
            let roles = onto.resolve_roles(a).unwrap();
            prop_assert_eq!(roles.iter().filter(|r| r.is_focal()).count(), 1);
            // inherited roles of every ancestor are visible
            for b in &ids {
                if onto.subsumes(b, a).unwrap() {
                    let own = format!("r{}", &b[1..]);
                    prop_assert!(roles.iter().any(|r| r.name == own));
                }
                if a != b && onto.subsumes(a, b).unwrap() {
                    prop_assert!(!onto.subsumes(b, a).unwrap());
                }
            }
        }
    }
}
