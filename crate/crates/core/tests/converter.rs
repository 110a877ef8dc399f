use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use skate_core::converter::{
    compose_rule, export, load_rules, validate_rules, Atom, ConvertError, ExportFormat, HornRule,
    Modality, Term, BEFORE, RULES_VERSION,
};
use skate_core::fixtures;
use skate_core::session::{ConstructionSemantics, Engine, FixedClock, Session};
use skate_testkit::scripts::{self, Script};

fn engine() -> Engine {
    Engine::new(Arc::new(fixtures::recognizer()))
        .with_clock(Arc::new(FixedClock("2021-10-18T00:00:00Z".into())))
}

fn rules_for(e: &Engine, script: &Script) -> Vec<HornRule> {
    let mut s = scripts::run(e, "t", script).unwrap();
    let root = e.submit(&mut s).unwrap();
    compose_rule(&s.template, &root, e.ontology(), "entry:t").unwrap()
}

/// Key two fillers must share to denote the same thing, computed
/// independently of the converter.
fn oracle_key(text: &str) -> String {
    let skip = [
        "a", "an", "the", "this", "that", "these", "those", "some", "of", "to", "from", "in", "on",
        "at", "with", "for", "by", "into",
    ];
    let lower = text.to_lowercase();
    let words: Vec<&str> = lower.split_whitespace().collect();
    let first = words
        .iter()
        .position(|w| !skip.contains(w))
        .unwrap_or(words.len());
    words[first..].join(" ")
}

fn text_terms(rule: &HornRule) -> Vec<(String, String)> {
    rule.antecedents
        .iter()
        .chain(std::iter::once(&rule.consequent))
        .flat_map(|a| a.args.values())
        .filter_map(|t| match t {
            Term::Text { text, var } => Some((text.clone(), var.clone())),
            _ => None,
        })
        .collect()
}

#[test]
fn cookie_is_one_fact() {
    let e = engine();
    let rules = rules_for(&e, &scripts::cookie());
    assert_eq!(rules.len(), 1);
    let r = &rules[0];
    assert!(r.is_fact());
    assert_eq!(r.modality, Modality::Always);
    assert_eq!(r.construction, ConstructionSemantics::Statement);
    assert_eq!(r.consequent.pred, "taking");
    let args: BTreeMap<&str, &Term> = r
        .consequent
        .args
        .iter()
        .map(|(k, v)| (k.as_str(), v))
        .collect();
    assert_eq!(
        args["agent"],
        &Term::Text {
            text: "The child".into(),
            var: "V1".into()
        }
    );
    assert_eq!(
        args["theme"],
        &Term::Text {
            text: "the cookie".into(),
            var: "V2".into()
        }
    );
    assert_eq!(
        args["source"],
        &Term::Text {
            text: "from the jar".into(),
            var: "V3".into()
        }
    );
    assert_eq!(r.provenance, "entry:t");
}

#[test]
fn scripted_entries_render_as_expected() {
    let e = engine();
    let expected = [
        "often: wanting(experiencer: V1<\"people\">, desired: E2).\n\
         often: eating[E2](ingestor: V1<\"people\">, ingestibles: E1).\n\
         often: tasty[E1](entity: V2<\"food\">).\n",
        "often: approaching(theme: V1<\"animal1\">, goal: V2<\"animal2\">), gt(left: E1, right: E2), \
         size[E1](entity: V1<\"of animal1\">), size[E2](entity: V2<\"of animal2\">) => \
         feeling(experiencer: V2<\"animal2\">, emotion: V3<\"fear\">).\n",
        "often: helping(helper: V1<\"person1\">, benefited: V2<\"person2\">) => \
         thanking(thanker: V2<\"person2\">, thankee: V1<\"person1\">).\n",
        "not covering(coverer: V1<\"object1\">, covered: V2<\"object2\">) => \
         seeing(perceiver: V3<\"someone\">, phenomenon: V2<\"object2\">).\n",
        "not knowing(cognizer: V1<\"person1\">, content: V2<\"a fact\">), \
         telling(speaker: V3<\"person2\">, addressee: V1<\"person1\">, message: V2<\"the fact\">) => \
         learning(learner: V1<\"person1\">, content: V2<\"the fact\">).\n",
    ];
    for (script, want) in scripts::commonsense_rules().iter().zip(expected) {
        let rules = rules_for(&e, script);
        assert_eq!(
            export(&rules, ExportFormat::LogicText),
            want,
            "{}",
            script.target
        );
    }
}

#[test]
fn every_scripted_entry_validates_and_unifies() {
    let e = engine();
    let mut all = vec![scripts::cookie()];
    all.extend(scripts::commonsense_rules());
    for script in &all {
        let rules = rules_for(&e, script);
        assert!(!rules.is_empty());
        validate_rules(&rules, e.ontology()).unwrap();
        for r in &rules {
            let terms = text_terms(r);
            for (t1, v1) in &terms {
                for (t2, v2) in &terms {
                    let same_key = oracle_key(t1) == oracle_key(t2) && !oracle_key(t1).is_empty();
                    assert_eq!(
                        v1 == v2,
                        same_key,
                        "{t1:?}/{v1} vs {t2:?}/{v2} in {}",
                        script.target
                    );
                }
            }
        }
    }
}

#[test]
fn variables_are_numbered_in_order_of_first_use() {
    let e = engine();
    for script in scripts::commonsense_rules() {
        let rules = rules_for(&e, &script);
        let mut seen: Vec<String> = Vec::new();
        for r in &rules {
            for a in r.antecedents.iter().chain(std::iter::once(&r.consequent)) {
                for t in a.args.values() {
                    if let Some(v) = t.var_name().filter(|v| v.starts_with('V')) {
                        if !seen.iter().any(|s| s == v) {
                            seen.push(v.to_string());
                        }
                    }
                }
            }
        }
        let want: Vec<String> = (1..=seen.len()).map(|i| format!("V{i}")).collect();
        assert_eq!(seen, want, "{}", script.target);
    }
}

#[test]
fn separate_entries_start_fresh() {
    let e = engine();
    let a = rules_for(&e, &scripts::cookie());
    let b = rules_for(&e, &scripts::cookie());
    assert_eq!(a, b);
}

#[test]
fn after_then_orders_the_events() {
    let e = engine();
    let mut s: Session = e.start("a", "after_then").unwrap();
    e.input_text(&mut s, "after", "person1 helps person2")
        .unwrap();
    e.choose_sense(&mut s, "after", "helping").unwrap();
    e.input_text(&mut s, "then", "person2 thanks person1")
        .unwrap();
    e.choose_sense(&mut s, "then", "thanking").unwrap();
    let root = e.submit(&mut s).unwrap();
    let rules = compose_rule(&s.template, &root, e.ontology(), "p").unwrap();
    assert_eq!(rules.len(), 1);
    let r = &rules[0];
    assert_eq!(r.construction, ConstructionSemantics::TemporalSequence);
    let before = r
        .antecedents
        .iter()
        .find(|a| a.pred == BEFORE)
        .expect("ordering atom");
    let e1 = before.args["earlier"].var_name().unwrap();
    let e2 = before.args["later"].var_name().unwrap();
    assert_eq!(r.antecedents[0].event.as_deref(), Some(e1));
    assert_eq!(r.consequent.event.as_deref(), Some(e2));
    validate_rules(&rules, e.ontology()).unwrap();
}

#[test]
fn conjunctive_consequent_is_refused() {
    let e = engine();
    let mut s = e.start("c", "if_then").unwrap();
    e.input_text(&mut s, "if", "person1 helps person2").unwrap();
    e.choose_sense(&mut s, "if", "helping").unwrap();
    e.input_text(
        &mut s,
        "then",
        "person2 thanks person1 and person1 helps person2",
    )
    .unwrap();
    e.choose_sense(&mut s, "then", "and").unwrap();
    let root = e.submit(&mut s).unwrap();
    assert_eq!(
        compose_rule(&s.template, &root, e.ontology(), "p"),
        Err(ConvertError::MultipleConsequents {
            slot: "then".into(),
            count: 2
        })
    );
}

#[test]
fn validation_catches_unknown_names() {
    let e = engine();
    let rule = |consequent: Atom| HornRule {
        modality: Modality::Always,
        construction: ConstructionSemantics::Statement,
        antecedents: Vec::new(),
        consequent,
        provenance: String::new(),
    };
    let bad_pred = rule(Atom::new("levitating").arg("agent", Term::var("V1")));
    assert_eq!(
        validate_rules(&[bad_pred], e.ontology()),
        Err(ConvertError::UnknownPredicate("levitating".into()))
    );
    let bad_role = rule(Atom::new("taking").arg("colour", Term::var("V1")));
    assert!(matches!(
        validate_rules(&[bad_role], e.ontology()),
        Err(ConvertError::UnknownRole { .. })
    ));
    let builtin = rule(
        Atom::new("gt")
            .arg("left", Term::var("E1"))
            .arg("right", Term::var("E2")),
    );
    validate_rules(&[builtin], e.ontology()).unwrap();
}

#[test]
fn json_export_round_trips_byte_for_byte() {
    let e = engine();
    let mut rules = Vec::new();
    for script in scripts::commonsense_rules() {
        rules.extend(rules_for(&e, &script));
    }
    let json = export(&rules, ExportFormat::Json);
    let back = load_rules(&json).unwrap();
    assert_eq!(back.version, RULES_VERSION);
    assert_eq!(back.rules, rules);
    assert_eq!(export(&back.rules, ExportFormat::Json), json);
    assert!(matches!(
        load_rules("{\"rules\": 3}"),
        Err(ConvertError::Parse(_))
    ));
}

fn arb_term() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[VE][1-9]".prop_map(Term::var),
        ("[a-z]{1,6}", proptest::option::of("[a-z]{1,6}")).prop_map(|(var, type_hint)| Term::Var {
            var: format!("V{var}"),
            type_hint
        }),
        ("[ a-zA-Z0-9\"]{0,12}", "V[1-9]").prop_map(|(text, var)| Term::Text { text, var }),
        "[a-z0-9 ]{0,8}".prop_map(Term::constant),
    ]
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    (
        "[a-z-]{1,10}",
        proptest::option::of("E[1-9]"),
        proptest::collection::vec(("[a-z]{1,8}", arb_term()), 0..4),
        any::<bool>(),
    )
        .prop_map(|(pred, event, args, negated)| {
            let mut a = Atom::new(pred);
            for (r, t) in args {
                a = a.arg(r, t);
            }
            a.event = event;
            a.negated = negated;
            a
        })
}

proptest! {
    #[test]
    fn arbitrary_rules_round_trip(
        rules in proptest::collection::vec(
            (proptest::collection::vec(arb_atom(), 0..3), arb_atom(), any::<bool>(), "[a-z:0-9]{0,10}"), 0..4)
    ) {
        let rules: Vec<HornRule> = rules.into_iter().map(|(antecedents, consequent, often, provenance)| HornRule {
            modality: if often { Modality::Often } else { Modality::Always },
            construction: ConstructionSemantics::CausalRule,
            antecedents,
            consequent,
            provenance,
        }).collect();
        let json = export(&rules, ExportFormat::Json);
        let back = load_rules(&json).unwrap();
        prop_assert_eq!(&back.rules, &rules);
        prop_assert_eq!(export(&back.rules, ExportFormat::Json), json);
        let text = export(&rules, ExportFormat::LogicText);
        prop_assert_eq!(text.lines().count(), rules.len());
    }
}

#[test]
fn unrefined_conjuncts_become_text_atoms() {
    let e = engine();
    let mut s = e.start("c", "if_then").unwrap();
    e.input_text(
        &mut s,
        "if",
        "person1 helps person2 and person2 thanks person1",
    )
    .unwrap();
    e.choose_sense(&mut s, "if", "and").unwrap();
    e.input_text(&mut s, "then", "person2 thanks person1")
        .unwrap();
    e.choose_sense(&mut s, "then", "thanking").unwrap();
    let root = e.submit(&mut s).unwrap();
    let rules = compose_rule(&s.template, &root, e.ontology(), "p").unwrap();
    let preds: Vec<&str> = rules[0]
        .antecedents
        .iter()
        .map(|a| a.pred.as_str())
        .collect();
    assert_eq!(preds, ["text", "text"]);
    validate_rules(&rules, e.ontology()).unwrap();
}
