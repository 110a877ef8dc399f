//! Day-stepping reference for policy queries and a random scenario
//! generator.
//!
//! The simulator grounds every rule over every assignment of its variables
//! to the constants of the world, then walks the calendar one day at a time
//! counting the days each person still owes.

use std::collections::{BTreeMap, BTreeSet};

use chrono::{Days, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use skate_core::converter::{Atom, HornRule, Modality, Term};
use skate_core::policy::{
    parse_duration, Adjuncts, PolicyDocument, StateDef, StateKind, WorldFact,
};
use skate_core::session::ConstructionSemantics;

/// A ground dated fact as the simulator sees it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimFact {
    pub pred: String,
    pub args: Vec<(String, String)>,
    pub date: NaiveDate,
    pub duration: Option<u32>,
}

impl SimFact {
    fn get(&self, role: &str) -> Option<&str> {
        self.args
            .iter()
            .find(|(r, _)| r == role)
            .map(|(_, v)| v.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimStatus {
    pub person: String,
    pub state: String,
    pub days_remaining: i64,
}

fn value(t: &Term) -> Option<String> {
    match t {
        Term::Const { value } => Some(value.trim().to_lowercase()),
        _ => None,
    }
}

fn var(t: &Term) -> Option<&str> {
    match t {
        Term::Var { var, .. } | Term::Text { var, .. } => Some(var),
        Term::Const { .. } => None,
    }
}

fn rule_vars(r: &HornRule) -> Vec<String> {
    let mut vs = BTreeSet::new();
    for a in &r.antecedents {
        for (role, t) in &a.args {
            if role != "focal" {
                vs.extend(var(t).map(String::from));
            }
        }
    }
    vs.into_iter().collect()
}

fn ground(atom: &Atom, env: &BTreeMap<String, String>, head: bool) -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = atom
        .args
        .iter()
        .filter(|(role, _)| role.as_str() != "focal" && !(head && role.as_str() == "duration"))
        .map(|(role, t)| {
            let v = match t {
                Term::Const { .. } => value(t).unwrap(),
                Term::Var { var, .. } => env[var].clone(),
                Term::Text { var, text } => env
                    .get(var)
                    .cloned()
                    .unwrap_or_else(|| text.trim().to_lowercase()),
            };
            (role.clone(), v)
        })
        .collect();
    out.sort();
    out
}

fn matches(fact: &SimFact, pred: &str, args: &[(String, String)]) -> bool {
    fact.pred == pred && args.iter().all(|(r, v)| fact.get(r) == Some(v.as_str()))
}

/// Fires `rules` over `facts` by exhaustive grounding until nothing new
/// appears.
fn fixpoint(
    rules: &[HornRule],
    facts: &mut BTreeSet<SimFact>,
    duration_of: &dyn Fn(&HornRule) -> Option<u32>,
) {
    loop {
        let universe: BTreeSet<String> = facts
            .iter()
            .flat_map(|f| f.args.iter().map(|(_, v)| v.clone()))
            .collect();
        let universe: Vec<String> = universe.into_iter().collect();
        let mut fresh = Vec::new();
        for r in rules {
            let vars = rule_vars(r);
            let total = universe.len().pow(vars.len() as u32);
            for mut code in 0..total {
                let mut env = BTreeMap::new();
                for v in &vars {
                    env.insert(v.clone(), universe[code % universe.len()].clone());
                    code /= universe.len();
                }
                let body: Vec<(String, Vec<(String, String)>)> = r
                    .antecedents
                    .iter()
                    .map(|a| (a.pred.clone(), ground(a, &env, false)))
                    .collect();
                if !body
                    .iter()
                    .all(|(p, args)| facts.iter().any(|f| matches(f, p, args)))
                {
                    continue;
                }
                let (p0, a0) = &body[0];
                let dates: BTreeSet<NaiveDate> = facts
                    .iter()
                    .filter(|f| matches(f, p0, a0))
                    .map(|f| f.date)
                    .collect();
                for date in dates {
                    let f = SimFact {
                        pred: r.consequent.pred.clone(),
                        args: ground(&r.consequent, &env, true),
                        date,
                        duration: duration_of(r),
                    };
                    if !facts.contains(&f) {
                        fresh.push(f);
                    }
                }
            }
        }
        if fresh.is_empty() {
            return;
        }
        facts.extend(fresh);
    }
}

fn to_sim(f: &WorldFact) -> SimFact {
    let mut args: Vec<(String, String)> = f
        .args
        .iter()
        .map(|(r, t)| (r.clone(), value(t).expect("ground fact")))
        .collect();
    args.sort();
    SimFact {
        pred: f.pred.clone(),
        args,
        date: f.date,
        duration: None,
    }
}

/// World facts closed under the background rules.
pub fn simulate_world(doc: &PolicyDocument, facts: &[WorldFact]) -> BTreeSet<SimFact> {
    let mut set: BTreeSet<SimFact> = facts.iter().map(to_sim).collect();
    if !set.is_empty() {
        fixpoint(&doc.background, &mut set, &|_| None);
    }
    set
}

/// All facts after background and policy rules.
pub fn simulate_closure(doc: &PolicyDocument, facts: &[WorldFact]) -> BTreeSet<SimFact> {
    let mut set = simulate_world(doc, facts);
    if set.is_empty() {
        return set;
    }
    let state = |id: &str| doc.states.iter().find(|s| s.id == id);
    fixpoint(&doc.rules, &mut set, &|r| {
        let s = state(&r.consequent.pred)?;
        if s.kind != StateKind::Compliance {
            return None;
        }
        let from_rule = r.consequent.args.get("duration").map(|t| match t {
            Term::Const { value } => parse_duration(value).unwrap(),
            Term::Text { text, .. } => parse_duration(text).unwrap(),
            Term::Var { .. } => panic!("unbound duration"),
        });
        Some(from_rule.or(s.default_adjuncts.duration).unwrap_or(0))
    });
    set
}

/// Per-person statuses at `asof`, counting remaining days by stepping
/// through the calendar.
pub fn simulate_query(
    doc: &PolicyDocument,
    facts: &[WorldFact],
    asof: NaiveDate,
) -> Vec<SimStatus> {
    let person = |f: &SimFact| {
        doc.person_roles
            .iter()
            .find_map(|r| f.get(r).map(String::from))
    };
    let people: BTreeSet<String> = simulate_world(doc, facts)
        .iter()
        .filter_map(person)
        .collect();
    let closure = simulate_closure(doc, facts);
    let mut out = Vec::new();
    for p in people {
        // (end, state, start) of every compliance interval for p
        let mut intervals: Vec<(NaiveDate, String, NaiveDate)> = Vec::new();
        for f in closure
            .iter()
            .filter(|f| f.duration.is_some() && person(f).as_deref() == Some(p.as_str()))
        {
            let end = f
                .date
                .checked_add_days(Days::new(f.duration.unwrap() as u64))
                .unwrap();
            intervals.push((end, f.pred.clone(), f.date));
        }
        // latest end, then smaller state id, then earlier start
        intervals.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let chosen = intervals.first().cloned();
        let mut remaining = 0i64;
        if let Some((end, _, _)) = &chosen {
            let mut day = asof;
            while day < *end {
                remaining += 1;
                day = day.succ_opt().unwrap();
            }
        }
        match chosen {
            Some((_, state, _)) if remaining > 0 => out.push(SimStatus {
                person: p,
                state,
                days_remaining: remaining,
            }),
            _ => {
                if let Some(d) = &doc.default_state {
                    out.push(SimStatus {
                        person: p,
                        state: d.clone(),
                        days_remaining: 0,
                    });
                }
            }
        }
    }
    out
}

/// A random policy and world within the bounds used by the oracle tests.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub doc: PolicyDocument,
    pub facts: Vec<WorldFact>,
    pub window_start: NaiveDate,
    pub window_days: u32,
    pub asof: NaiveDate,
}

const OBSERVED: &[(&str, &[&str])] = &[
    ("fever", &["person"]),
    ("cough", &["person"]),
    ("co-location", &["person", "other"]),
    ("contact", &["person", "other"]),
];
const INTERMEDIATE: &[&str] = &["symptomatic", "exposed", "flagged"];
const COMPLIANCE: &[&str] = &["quarantine", "isolation"];

fn arity(pred: &str) -> &'static [&'static str] {
    OBSERVED
        .iter()
        .find(|(p, _)| *p == pred)
        .map_or(&["person"], |(_, r)| r)
}

/// Builds a random scenario: up to `max_people` people, up to `max_rules`
/// policy rules and facts spread over `window_days` days.
pub fn random_scenario(
    seed: u64,
    max_people: usize,
    max_rules: usize,
    window_days: u32,
) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let people: Vec<String> = (0..rng.random_range(1..=max_people))
        .map(|i| format!("p{i}"))
        .collect();
    let mut states: Vec<StateDef> = INTERMEDIATE
        .iter()
        .map(|id| StateDef {
            id: id.to_string(),
            kind: StateKind::Intermediate,
            frame: None,
            default_adjuncts: Adjuncts::default(),
        })
        .collect();
    for id in COMPLIANCE {
        let duration = rng.random_bool(0.7).then(|| rng.random_range(0..=14));
        states.push(StateDef {
            id: id.to_string(),
            kind: StateKind::Compliance,
            frame: None,
            default_adjuncts: Adjuncts {
                duration,
                population: None,
            },
        });
    }
    states.push(StateDef {
        id: "return".into(),
        kind: StateKind::Compliance,
        frame: None,
        default_adjuncts: Adjuncts::default(),
    });

    let vars = ["X", "Y"];
    let mut rules = Vec::new();
    for _ in 0..rng.random_range(1..=max_rules) {
        let n_ante = rng.random_range(1..=2);
        let mut antecedents = Vec::new();
        for _ in 0..n_ante {
            let pred = if rng.random_bool(0.6) {
                OBSERVED.choose(&mut rng).unwrap().0
            } else {
                INTERMEDIATE.choose(&mut rng).unwrap()
            };
            let mut a = Atom::new(pred);
            for role in arity(pred) {
                a = a.arg(*role, Term::var(*vars.choose(&mut rng).unwrap()));
            }
            antecedents.push(a);
        }
        let bound: Vec<String> = antecedents
            .iter()
            .flat_map(|a| a.args.values().filter_map(|t| var(t).map(String::from)))
            .collect();
        let head = if rng.random_bool(0.5) {
            INTERMEDIATE.choose(&mut rng).unwrap()
        } else {
            COMPLIANCE.choose(&mut rng).unwrap()
        };
        let mut consequent =
            Atom::new(*head).arg("person", Term::var(bound.choose(&mut rng).unwrap().clone()));
        if COMPLIANCE.contains(head) && rng.random_bool(0.6) {
            let days = rng.random_range(0..=14u32);
            let t = if rng.random_bool(0.5) {
                Term::constant(days.to_string())
            } else {
                Term::Text {
                    text: format!("for {days} days"),
                    var: "D".into(),
                }
            };
            consequent = consequent.arg("duration", t);
        }
        rules.push(HornRule {
            modality: Modality::Always,
            construction: ConstructionSemantics::PolicyBranch,
            antecedents,
            consequent,
            provenance: "random".into(),
        });
    }
    let background = skate_core::fixtures::policy_document().background;
    let doc = PolicyDocument {
        person_roles: vec!["person".into(), "other".into()],
        states,
        default_state: Some("return".into()),
        rules,
        background,
    };

    let window_start = NaiveDate::from_ymd_opt(2021, 9, 1).unwrap();
    let day = |rng: &mut ChaCha8Rng| {
        window_start
            .checked_add_days(Days::new(rng.random_range(0..window_days) as u64))
            .unwrap()
    };
    let mut facts = Vec::new();
    for _ in 0..rng.random_range(0..=8) {
        let (pred, roles) = OBSERVED[rng.random_range(0..OBSERVED.len())];
        let args: Vec<(&str, &str)> = roles
            .iter()
            .map(|r| (*r, people.choose(&mut rng).unwrap().as_str()))
            .collect();
        facts.push(WorldFact::new(pred, &args, day(&mut rng)));
    }
    let asof = day(&mut rng);
    Scenario {
        doc,
        facts,
        window_start,
        window_days,
        asof,
    }
}
