//! Compliance policy graphs: states, conditional rules with duration
//! adjuncts, dated world facts and forward chaining to per-person
//! compliance statuses.
//!
//! Rules are the converter's `HornRule`s. Atoms match facts role by role;
//! the `focal` argument and event variables are ignored. A derived fact is
//! dated by the fact that matched its first antecedent.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use chrono::NaiveDate;
use indexmap::IndexMap;
use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::converter::{Atom, HornRule, RuleSet, Term};

pub const DURATION: &str = "duration";
pub const POPULATION: &str = "population";

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("rule {rule} concludes `{state}`, which is not a defined state")]
    DanglingState { rule: usize, state: String },
    #[error("rule {rule} continues from compliance state `{state}`")]
    NonTerminalCompliance { rule: usize, state: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("fact `{pred}` has a non-constant `{role}` argument")]
    NonGroundFact { pred: String, role: String },
    #[error("rule {rule}: variable `{var}` in the conclusion is not bound by a condition")]
    UnsafeRule { rule: usize, var: String },
    #[error("rule {rule}: {what} is not supported in policy conditions")]
    Unsupported { rule: usize, what: String },
    #[error("cannot read a day count from `{0}`")]
    BadDuration(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("malformed policy document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Compliance,
    Intermediate,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Adjuncts {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDef {
    pub id: String,
    pub kind: StateKind,
    /// Evoking frame; the state id when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
    #[serde(default)]
    pub default_adjuncts: Adjuncts,
}

fn default_person_roles() -> Vec<String> {
    vec!["person".into()]
}

/// Everything needed to build a policy graph. Serialized as the rule JSON
/// plus state definitions and background rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyDocument {
    #[serde(default = "default_person_roles")]
    pub person_roles: Vec<String>,
    pub states: Vec<StateDef>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub default_state: Option<String>,
    #[serde(default)]
    pub rules: Vec<HornRule>,
    /// World knowledge applied to facts as they are asserted.
    #[serde(default)]
    pub background: Vec<HornRule>,
}

impl PolicyDocument {
    pub fn parse(src: &str) -> Result<Self, PolicyError> {
        serde_json::from_str(src).map_err(|e| PolicyError::Parse(e.to_string()))
    }

    /// Replaces the rules with those of a converter rule set.
    pub fn with_rules(mut self, rules: RuleSet) -> Self {
        self.rules = rules.rules;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Compliance,
    Intermediate,
    /// Observed from the world.
    Variable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub rule: usize,
}

/// A rule prepared for matching.
#[derive(Debug, Clone, PartialEq)]
struct Compiled {
    antecedents: Vec<Pattern>,
    head: Pattern,
    duration: Option<u32>,
}

#[derive(Debug, Clone, PartialEq)]
struct Pattern {
    pred: String,
    args: Vec<(String, Slot)>,
}

#[derive(Debug, Clone, PartialEq)]
enum Slot {
    Var(String),
    Const(String),
    /// Conclusion filler: the binding of `var` if a condition binds it,
    /// else the text itself.
    Text {
        var: String,
        text: String,
    },
}

/// Validated, immutable policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyGraph {
    doc: PolicyDocument,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    rules: Vec<Compiled>,
    background: Vec<Compiled>,
}

/// Lowercased, trimmed constant.
pub fn normalize_const(v: &str) -> String {
    v.trim().to_lowercase()
}

/// Reads a day count from a duration filler such as "14", "for 5 days" or
/// "for two weeks".
pub fn parse_duration(text: &str) -> Result<u32, PolicyError> {
    const NUMBERS: &[&str] = &[
        "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
        "eleven", "twelve", "thirteen", "fourteen",
    ];
    let bad = || PolicyError::BadDuration(text.to_string());
    let words: Vec<String> = text
        .split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .collect();
    let (i, n) = words
        .iter()
        .enumerate()
        .find_map(|(i, w)| {
            w.parse::<u32>()
                .ok()
                .or_else(|| NUMBERS.iter().position(|n| n == w).map(|n| n as u32))
                .map(|n| (i, n))
        })
        .ok_or_else(bad)?;
    let scale = match words.get(i + 1).map(String::as_str) {
        Some("week" | "weeks") => 7,
        None | Some("day" | "days") => 1,
        Some(_) => return Err(bad()),
    };
    Ok(n * scale)
}

fn compile(idx: usize, rule: &HornRule) -> Result<Compiled, PolicyError> {
    let pattern = |atom: &Atom, head: bool| -> Result<Pattern, PolicyError> {
        if atom.negated {
            return Err(PolicyError::Unsupported {
                rule: idx,
                what: format!("negated `{}`", atom.pred),
            });
        }
        let mut args = Vec::new();
        for (role, term) in &atom.args {
            if role == "focal" || (head && role == DURATION) {
                continue;
            }
            let slot = match term {
                Term::Const { value } => Slot::Const(normalize_const(value)),
                Term::Var { var, .. } => Slot::Var(var.clone()),
                // an unbound text filler in a conclusion is read literally
                Term::Text { text, var } if head => Slot::Text {
                    var: var.clone(),
                    text: normalize_const(text),
                },
                Term::Text { var, .. } => Slot::Var(var.clone()),
            };
            args.push((role.clone(), slot));
        }
        Ok(Pattern {
            pred: atom.pred.clone(),
            args,
        })
    };
    let antecedents = rule
        .antecedents
        .iter()
        .map(|a| pattern(a, false))
        .collect::<Result<Vec<_>, _>>()?;
    let bound: HashSet<&str> = antecedents
        .iter()
        .flat_map(|p| p.args.iter())
        .filter_map(|(_, s)| {
            if let Slot::Var(v) = s {
                Some(v.as_str())
            } else {
                None
            }
        })
        .collect();
    let mut head = pattern(&rule.consequent, true)?;
    for (_, slot) in head.args.iter_mut() {
        *slot = match std::mem::replace(slot, Slot::Const(String::new())) {
            Slot::Text { var, .. } if bound.contains(var.as_str()) => Slot::Var(var),
            Slot::Text { text, .. } => Slot::Const(text),
            Slot::Var(v) if !bound.contains(v.as_str()) => {
                return Err(PolicyError::UnsafeRule { rule: idx, var: v })
            }
            other => other,
        };
    }
    let duration = match rule.consequent.args.get(DURATION) {
        None => None,
        Some(Term::Const { value }) => Some(parse_duration(value)?),
        Some(Term::Text { text, .. }) => Some(parse_duration(text)?),
        Some(Term::Var { var, .. }) => {
            return Err(PolicyError::UnsafeRule {
                rule: idx,
                var: var.clone(),
            })
        }
    };
    Ok(Compiled {
        antecedents,
        head,
        duration,
    })
}

pub fn build_policy(doc: PolicyDocument) -> Result<PolicyGraph, PolicyError> {
    let mut states: HashMap<&str, StateKind> = HashMap::new();
    for s in &doc.states {
        if states.insert(&s.id, s.kind).is_some() {
            return Err(PolicyError::DuplicateState(s.id.clone()));
        }
    }
    if let Some(d) = &doc.default_state {
        if !states.contains_key(d.as_str()) {
            return Err(PolicyError::UnknownState(d.clone()));
        }
    }
    let mut edges = Vec::new();
    let mut variables = BTreeSet::new();
    for (i, r) in doc.rules.iter().enumerate() {
        let to = &r.consequent.pred;
        if !states.contains_key(to.as_str()) {
            return Err(PolicyError::DanglingState {
                rule: i,
                state: to.clone(),
            });
        }
        for a in &r.antecedents {
            match states.get(a.pred.as_str()) {
                Some(StateKind::Compliance) => {
                    return Err(PolicyError::NonTerminalCompliance {
                        rule: i,
                        state: a.pred.clone(),
                    })
                }
                Some(StateKind::Intermediate) => {}
                None => {
                    variables.insert(a.pred.clone());
                }
            }
            edges.push(Edge {
                from: a.pred.clone(),
                to: to.clone(),
                rule: i,
            });
        }
    }
    let rules = doc
        .rules
        .iter()
        .enumerate()
        .map(|(i, r)| compile(i, r))
        .collect::<Result<Vec<_>, _>>()?;
    let background = doc
        .background
        .iter()
        .enumerate()
        .map(|(i, r)| compile(i, r))
        .collect::<Result<Vec<_>, _>>()?;
    let mut nodes: Vec<Node> = doc
        .states
        .iter()
        .map(|s| Node {
            id: s.id.clone(),
            kind: match s.kind {
                StateKind::Compliance => NodeKind::Compliance,
                StateKind::Intermediate => NodeKind::Intermediate,
            },
        })
        .collect();
    nodes.extend(variables.into_iter().map(|id| Node {
        id,
        kind: NodeKind::Variable,
    }));
    Ok(PolicyGraph {
        doc,
        nodes,
        edges,
        rules,
        background,
    })
}

impl PolicyGraph {
    pub fn document(&self) -> &PolicyDocument {
        &self.doc
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn state(&self, id: &str) -> Option<&StateDef> {
        self.doc.states.iter().find(|s| s.id == id)
    }

    fn person_of(&self, fact: &Fact) -> Option<String> {
        self.doc
            .person_roles
            .iter()
            .find_map(|r| fact.args.get(r).cloned())
    }
}

/// A ground, dated fact. Derived compliance facts carry their duration.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fact {
    pub pred: String,
    pub args: BTreeMap<String, String>,
    pub date: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration: Option<u32>,
}

/// A fact as it arrives on the wire: arguments are plain strings or
/// converter terms, which must be constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldFact {
    pub pred: String,
    #[serde(deserialize_with = "de_args")]
    pub args: IndexMap<String, Term>,
    pub date: NaiveDate,
}

fn de_args<'de, D: Deserializer<'de>>(d: D) -> Result<IndexMap<String, Term>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Arg {
        Plain(String),
        Term(Term),
    }
    let raw = IndexMap::<String, Arg>::deserialize(d)?;
    Ok(raw
        .into_iter()
        .map(|(k, v)| {
            let t = match v {
                Arg::Plain(s) => Term::constant(s),
                Arg::Term(t) => t,
            };
            (k, t)
        })
        .collect())
}

impl WorldFact {
    pub fn new(pred: impl Into<String>, args: &[(&str, &str)], date: NaiveDate) -> Self {
        WorldFact {
            pred: pred.into(),
            args: args
                .iter()
                .map(|(r, v)| (r.to_string(), Term::constant(*v)))
                .collect(),
            date,
        }
    }

    fn ground(&self) -> Result<Fact, PolicyError> {
        let mut args = BTreeMap::new();
        for (role, t) in &self.args {
            match t {
                Term::Const { value } => {
                    args.insert(role.clone(), normalize_const(value));
                }
                _ => {
                    return Err(PolicyError::NonGroundFact {
                        pred: self.pred.clone(),
                        role: role.clone(),
                    })
                }
            }
        }
        Ok(Fact {
            pred: self.pred.clone(),
            args,
            date: self.date,
            duration: None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FactsDocument {
    pub facts: Vec<WorldFact>,
}

/// A snapshot of the world. Asserting produces a new version.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct World {
    version: u64,
    facts: BTreeSet<Fact>,
}

impl World {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    /// Asserted facts and their background consequences.
    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.iter()
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }
}

/// Adds facts to a copy of `world` and closes it under the background
/// rules. Nothing is added if any fact is not ground.
pub fn assert_facts(
    graph: &PolicyGraph,
    world: &World,
    facts: &[WorldFact],
) -> Result<World, PolicyError> {
    let ground = facts
        .iter()
        .map(WorldFact::ground)
        .collect::<Result<Vec<_>, _>>()?;
    if ground.is_empty() {
        return Ok(world.clone());
    }
    let mut set = world.facts.clone();
    set.extend(ground);
    saturate(&graph.background, &mut set, |_| None);
    Ok(World {
        version: world.version + 1,
        facts: set,
    })
}

fn match_pattern(p: &Pattern, fact: &Fact, env: &mut Vec<(String, String)>) -> bool {
    if p.pred != fact.pred {
        return false;
    }
    let mark = env.len();
    for (role, slot) in &p.args {
        let Some(value) = fact.args.get(role) else {
            env.truncate(mark);
            return false;
        };
        let ok = match slot {
            Slot::Const(c) => c == value,
            Slot::Var(v) | Slot::Text { var: v, .. } => match env.iter().find(|(k, _)| k == v) {
                Some((_, bound)) => bound == value,
                None => {
                    env.push((v.clone(), value.clone()));
                    true
                }
            },
        };
        if !ok {
            env.truncate(mark);
            return false;
        }
    }
    true
}

/// All (bindings, first-antecedent date) pairs satisfying a rule body.
fn solutions(rule: &Compiled, facts: &BTreeSet<Fact>) -> Vec<(Vec<(String, String)>, NaiveDate)> {
    fn go(
        body: &[Pattern],
        facts: &BTreeSet<Fact>,
        env: &mut Vec<(String, String)>,
        date: Option<NaiveDate>,
        out: &mut Vec<(Vec<(String, String)>, NaiveDate)>,
    ) {
        let Some((first, rest)) = body.split_first() else {
            out.push((env.clone(), date.expect("non-empty body")));
            return;
        };
        for f in facts.iter().filter(|f| f.pred == first.pred) {
            let mark = env.len();
            if match_pattern(first, f, env) {
                go(rest, facts, env, date.or(Some(f.date)), out);
            }
            env.truncate(mark);
        }
    }
    let mut out = Vec::new();
    if !rule.antecedents.is_empty() {
        go(&rule.antecedents, facts, &mut Vec::new(), None, &mut out);
    }
    out
}

fn instantiate(
    rule: &Compiled,
    env: &[(String, String)],
    date: NaiveDate,
    duration: Option<u32>,
) -> Fact {
    let args = rule
        .head
        .args
        .iter()
        .map(|(role, slot)| {
            let v = match slot {
                Slot::Const(c) => c.clone(),
                Slot::Var(v) | Slot::Text { var: v, .. } => env
                    .iter()
                    .find(|(k, _)| k == v)
                    .map(|(_, b)| b.clone())
                    .expect("safe rule"),
            };
            (role.clone(), v)
        })
        .collect();
    Fact {
        pred: rule.head.pred.clone(),
        args,
        date,
        duration,
    }
}

/// Naive forward chaining to a fixpoint. Dates only come from existing
/// facts, so the closure is finite.
fn saturate(
    rules: &[Compiled],
    facts: &mut BTreeSet<Fact>,
    duration: impl Fn(&Compiled) -> Option<u32>,
) {
    loop {
        let mut fresh = Vec::new();
        for r in rules {
            for (env, date) in solutions(r, facts) {
                let f = instantiate(r, &env, date, duration(r));
                if !facts.contains(&f) {
                    fresh.push(f);
                }
            }
        }
        if fresh.is_empty() {
            return;
        }
        facts.extend(fresh);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersonStatus {
    pub person: String,
    pub state: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start_date: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_date: Option<NaiveDate>,
    pub days_remaining: i64,
}

impl PersonStatus {
    fn from_interval(
        person: String,
        state: String,
        start: NaiveDate,
        duration: u32,
        asof: NaiveDate,
    ) -> Self {
        let end = start + chrono::Days::new(u64::from(duration));
        PersonStatus {
            person,
            state,
            start_date: Some(start),
            end_date: Some(end),
            days_remaining: days_remaining(end, asof),
        }
    }
}

/// Whole days from `asof` to `end`, floored at zero.
pub fn days_remaining(end: NaiveDate, asof: NaiveDate) -> i64 {
    (end - asof).num_days().max(0)
}

/// Every fact derivable from the world under the policy rules.
pub fn closure(graph: &PolicyGraph, world: &World) -> BTreeSet<Fact> {
    let mut facts = world.facts.clone();
    let durations: HashMap<&str, Option<u32>> = graph
        .doc
        .states
        .iter()
        .map(|s| (s.id.as_str(), s.default_adjuncts.duration))
        .collect();
    let compliance: HashSet<&str> = graph
        .doc
        .states
        .iter()
        .filter(|s| s.kind == StateKind::Compliance)
        .map(|s| s.id.as_str())
        .collect();
    saturate(&graph.rules, &mut facts, |r| {
        compliance.contains(r.head.pred.as_str()).then(|| {
            r.duration
                .or(durations.get(r.head.pred.as_str()).copied().flatten())
                .unwrap_or(0)
        })
    });
    facts
}

/// Per-person compliance status at `asof`. Where several compliance facts
/// hold for a person the one ending last wins, then the smaller state id,
/// then the earlier start.
pub fn infer(graph: &PolicyGraph, world: &World, asof: NaiveDate) -> Vec<PersonStatus> {
    let mut best: BTreeMap<String, PersonStatus> = BTreeMap::new();
    for f in closure(graph, world) {
        let Some(duration) = f.duration else { continue };
        let Some(person) = graph.person_of(&f) else {
            continue;
        };
        let cand =
            PersonStatus::from_interval(person.clone(), f.pred.clone(), f.date, duration, asof);
        let better = |old: &PersonStatus| {
            (
                cand.end_date,
                std::cmp::Reverse(&cand.state),
                std::cmp::Reverse(cand.start_date),
            ) > (
                old.end_date,
                std::cmp::Reverse(&old.state),
                std::cmp::Reverse(old.start_date),
            )
        };
        match best.get(&person) {
            Some(old) if !better(old) => {}
            _ => {
                best.insert(person, cand);
            }
        }
    }
    best.into_values().collect()
}

/// Everyone named in a person role of any world fact.
pub fn people(graph: &PolicyGraph, world: &World) -> BTreeSet<String> {
    world
        .facts()
        .flat_map(|f| {
            graph
                .doc
                .person_roles
                .iter()
                .filter_map(|r| f.args.get(r).cloned())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub asof: NaiveDate,
    pub world_version: u64,
    pub statuses: Vec<PersonStatus>,
}

/// Statuses for every known person. People with no running compliance
/// state report the default state when the policy defines one.
pub fn query(
    graph: &PolicyGraph,
    world: &World,
    asof: NaiveDate,
    filter: Option<&str>,
) -> Result<Report, PolicyError> {
    if let Some(f) = filter {
        if graph.state(f).is_none() {
            return Err(PolicyError::UnknownState(f.to_string()));
        }
    }
    let mut derived: BTreeMap<String, PersonStatus> = infer(graph, world, asof)
        .into_iter()
        .map(|s| (s.person.clone(), s))
        .collect();
    let mut statuses = Vec::new();
    for person in people(graph, world) {
        let status = match derived.remove(&person) {
            Some(s) if s.days_remaining > 0 => Some(s),
            expired => graph.doc.default_state.as_ref().map(|d| PersonStatus {
                person: person.clone(),
                state: d.clone(),
                start_date: expired.and_then(|s| s.end_date),
                end_date: None,
                days_remaining: 0,
            }),
        };
        statuses.extend(status.filter(|s| filter.is_none_or(|f| f == s.state)));
    }
    Ok(Report {
        asof,
        world_version: world.version,
        statuses,
    })
}

/// Plain-text table of a report.
pub fn render_report(report: &Report) -> String {
    let mut out = format!(
        "as of {}\n{:<12} {:<14} {:<12} {:<12} {}\n",
        report.asof, "person", "state", "start", "end", "days left"
    );
    for s in &report.statuses {
        let d = |d: Option<NaiveDate>| d.map_or("-".to_string(), |d| d.to_string());
        out.push_str(&format!(
            "{:<12} {:<14} {:<12} {:<12} {}\n",
            s.person,
            s.state,
            d(s.start_date),
            d(s.end_date),
            s.days_remaining
        ));
    }
    out
}
