//! Lowering submitted frame trees to Horn-clause-like rules.
//!
//! Structured slots become atoms named after their frame, nested atoms are
//! linked through event variables, and unstructured fillers become
//! placeholder variables. Within one entry, fillers that read the same once
//! leading determiners and prepositions are dropped share a variable.

use std::collections::HashMap;
use std::fmt::Write as _;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::{Ontology, PartOfSpeech};
use crate::recognizer::chunker::PREPOSITIONS;
use crate::session::{ConstructionSemantics, Slot, SlotState, TemplateInstance, TemplateSpec};

/// Current version of the rule JSON layout.
pub const RULES_VERSION: u32 = 1;

/// Predicates the converter introduces itself.
pub const BEFORE: &str = "before";
pub const TEXT: &str = "text";

#[derive(Debug, Error, PartialEq)]
pub enum ConvertError {
    #[error("the `{slot}` slot lowers to {count} statements; split it into separate entries")]
    MultipleConsequents { slot: String, count: usize },
    #[error("template `{template}` has no `{slot}` slot")]
    MissingSlot { template: String, slot: String },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("predicate `{pred}` has no role `{role}`")]
    UnknownRole { pred: String, role: String },
    #[error("malformed rules document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Term {
    /// An uninterpreted filler: the placeholder keeps its source text.
    Text { text: String, var: String },
    Var {
        var: String,
        #[serde(default, rename = "type", skip_serializing_if = "Option::is_none")]
        type_hint: Option<String>,
    },
    Const {
        #[serde(rename = "const")]
        value: String,
    },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var {
            var: name.into(),
            type_hint: None,
        }
    }

    pub fn constant(value: impl Into<String>) -> Term {
        Term::Const {
            value: value.into(),
        }
    }

    /// The variable this term binds, if it is not a constant.
    pub fn var_name(&self) -> Option<&str> {
        match self {
            Term::Text { var, .. } | Term::Var { var, .. } => Some(var),
            Term::Const { .. } => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, Term::Const { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub pred: String,
    /// Variable standing for the event or entity the atom describes, when
    /// another atom refers to it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
    pub args: IndexMap<String, Term>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negated: bool,
}

impl Atom {
    pub fn new(pred: impl Into<String>) -> Atom {
        Atom {
            pred: pred.into(),
            event: None,
            args: IndexMap::new(),
            negated: false,
        }
    }

    pub fn arg(mut self, role: impl Into<String>, term: Term) -> Atom {
        self.args.insert(role.into(), term);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Always,
    Often,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HornRule {
    pub modality: Modality,
    pub construction: ConstructionSemantics,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
    pub provenance: String,
}

impl HornRule {
    pub fn is_fact(&self) -> bool {
        self.antecedents.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSet {
    pub version: u32,
    pub rules: Vec<HornRule>,
}

/// Unification key for a filler: lowercase words with leading
/// determiners and prepositions removed.
pub fn unification_key(text: &str) -> String {
    const LEADING: &[&str] = &[
        "a", "an", "the", "this", "that", "these", "those", "some", "of", "to",
    ];
    let words: Vec<String> = text
        .split(|c: char| !(c.is_alphanumeric() || c == '-' || c == '\''))
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect();
    let skip = words
        .iter()
        .take_while(|w| LEADING.contains(&w.as_str()) || PREPOSITIONS.contains(&w.as_str()))
        .count();
    words[skip..].join(" ")
}

/// Variable allocation for one entry.
#[derive(Debug, Default)]
pub struct VarEnv {
    by_key: HashMap<String, String>,
    next_var: usize,
    next_event: usize,
}

impl VarEnv {
    pub fn new() -> Self {
        Self::default()
    }

    fn fresh(&mut self) -> String {
        self.next_var += 1;
        format!("V{}", self.next_var)
    }

    pub fn fresh_event(&mut self) -> String {
        self.next_event += 1;
        format!("E{}", self.next_event)
    }

    /// Placeholder for `text`, shared with earlier fillers of equal key.
    pub fn placeholder(&mut self, text: &str) -> Term {
        let key = unification_key(text);
        let var = if key.is_empty() {
            self.fresh()
        } else if let Some(v) = self.by_key.get(&key) {
            v.clone()
        } else {
            let v = self.fresh();
            self.by_key.insert(key, v.clone());
            v
        };
        Term::Text {
            text: text.trim().to_string(),
            var,
        }
    }
}

/// The result of lowering one slot or instance.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Lowered {
    /// Atoms the slot states directly. More than one for a conjunction.
    pub heads: Vec<Atom>,
    /// Atoms reached through nested slots.
    pub nested: Vec<Atom>,
    /// What a parent slot refers to.
    pub term: Option<Term>,
}

impl Lowered {
    pub fn all(self) -> Vec<Atom> {
        self.heads.into_iter().chain(self.nested).collect()
    }
}

/// Lowers a frame instance. With `want_term` the head atom receives an
/// event variable so a parent can refer to it.
pub fn lower(
    instance: &TemplateInstance,
    env: &mut VarEnv,
    ontology: &Ontology,
    want_term: bool,
) -> Lowered {
    let frame = ontology.get(&instance.frame_id);
    let pos = frame.and_then(|f| f.pos);
    let builtin = frame.and_then(|f| f.builtin);

    if pos == Some(PartOfSpeech::Conj) {
        let mut out = Lowered::default();
        for slot in &instance.slots {
            let l = lower_clause(slot, env, ontology, want_term);
            out.heads.extend(l.heads);
            out.nested.extend(l.nested);
        }
        return out;
    }

    let filled: Vec<&Slot> = instance
        .slots
        .iter()
        .filter(|s| s.state != SlotState::Empty)
        .collect();
    let nominal = frame.is_none_or(|f| f.is_nominal());
    if nominal && filled.is_empty() {
        return Lowered {
            term: Some(Term::constant(&instance.frame_id)),
            ..Default::default()
        };
    }

    let mut atom = Atom::new(builtin.map_or(instance.frame_id.as_str(), |b| b.predicate()));
    atom.negated = instance.negated;
    if builtin.is_none() && !instance.trigger_text.is_empty() {
        atom.args.insert(
            "focal".into(),
            Term::constant(crate::text::lemmatize_phrase(&instance.trigger_text)),
        );
    }
    let mut nested = Vec::new();
    for slot in filled {
        let l = lower_slot(slot, env, ontology, true);
        if let Some(t) = l.term {
            atom.args.insert(slot.name.clone(), t);
        }
        nested.extend(l.heads);
        nested.extend(l.nested);
    }
    let term = if want_term && builtin.is_none() {
        let e = env.fresh_event();
        atom.event = Some(e.clone());
        Some(Term::var(e))
    } else {
        None
    };
    Lowered {
        heads: vec![atom],
        nested,
        term,
    }
}

/// Lowers one slot. Text fillers become placeholders; a top-level text
/// slot with no structure is stated through the `text` predicate.
pub fn lower_slot(slot: &Slot, env: &mut VarEnv, ontology: &Ontology, want_term: bool) -> Lowered {
    match &slot.state {
        SlotState::Empty => Lowered::default(),
        SlotState::Unstructured { text, .. } | SlotState::PendingDialogue { text, .. } => Lowered {
            term: Some(env.placeholder(text)),
            ..Default::default()
        },
        SlotState::Structured { instance } => lower(instance, env, ontology, want_term),
    }
}

/// Lowers a top-level slot into statements, wrapping bare text in a
/// `text(content: V)` atom.
fn lower_clause(slot: &Slot, env: &mut VarEnv, ontology: &Ontology, want_event: bool) -> Lowered {
    let mut l = lower_slot(slot, env, ontology, want_event);
    if l.heads.is_empty() {
        if let Some(term) = l.term.take() {
            let mut atom = Atom::new(TEXT).arg("content", term);
            if want_event {
                let e = env.fresh_event();
                atom.event = Some(e.clone());
                l.term = Some(Term::var(e));
            }
            l.heads.push(atom);
        }
    }
    l
}

fn starts_with_often(text: &str) -> bool {
    text.split(|c: char| !c.is_alphanumeric())
        .find(|w| !w.is_empty())
        .is_some_and(|w| w.eq_ignore_ascii_case("often"))
}

/// Builds the rules a submitted entry states.
pub fn compose_rule(
    spec: &TemplateSpec,
    root: &TemplateInstance,
    ontology: &Ontology,
    provenance: &str,
) -> Result<Vec<HornRule>, ConvertError> {
    let modality = root
        .slots
        .first()
        .and_then(|s| s.state.text())
        .filter(|t| starts_with_often(t))
        .map_or(Modality::Always, |_| Modality::Often);
    let slot = |name: &str| {
        root.slot(name).ok_or_else(|| ConvertError::MissingSlot {
            template: spec.id.clone(),
            slot: name.to_string(),
        })
    };
    let rule = |antecedents: Vec<Atom>, consequent: Atom| HornRule {
        modality,
        construction: spec.construction_semantics,
        antecedents,
        consequent,
        provenance: provenance.to_string(),
    };
    let mut env = VarEnv::new();

    // conditional shapes: (antecedent slot, consequent slot, event ordering)
    let conditional = match spec.construction_semantics {
        ConstructionSemantics::CausalRule | ConstructionSemantics::PolicyBranch => {
            Some(("if", "then", false))
        }
        ConstructionSemantics::TemporalSequence => Some(("after", "then", true)),
        ConstructionSemantics::PolicyStateDef
            if root
                .slot("condition")
                .is_some_and(|s| s.state != SlotState::Empty) =>
        {
            Some(("condition", "state", false))
        }
        _ => None,
    };

    if let Some((ante_name, cons_name, ordered)) = conditional {
        let ante = lower_clause(slot(ante_name)?, &mut env, ontology, ordered);
        let cons = lower_clause(slot(cons_name)?, &mut env, ontology, ordered);
        if cons.heads.len() != 1 {
            return Err(ConvertError::MultipleConsequents {
                slot: cons_name.to_string(),
                count: cons.heads.len(),
            });
        }
        let mut antecedents = ante.heads.clone();
        antecedents.extend(ante.nested.iter().cloned());
        if ordered {
            if let (Some(e1), Some(e2)) = (ante.term.clone(), cons.term.clone()) {
                antecedents.push(Atom::new(BEFORE).arg("earlier", e1).arg("later", e2));
            }
        }
        let mut heads = cons.heads;
        heads.extend(cons.nested);
        return Ok(heads
            .into_iter()
            .map(|h| rule(antecedents.clone(), h))
            .collect());
    }

    // statements: every slot states facts
    let mut rules = Vec::new();
    for s in &root.slots {
        for atom in lower_clause(s, &mut env, ontology, false).all() {
            rules.push(rule(Vec::new(), atom));
        }
    }
    Ok(rules)
}

fn builtin_roles(pred: &str) -> Option<&'static [&'static str]> {
    match pred {
        "gt" | "lt" | "eq" => Some(&["left", "right"]),
        BEFORE => Some(&["earlier", "later"]),
        TEXT => Some(&["content"]),
        _ => None,
    }
}

/// Checks every atom's predicate and roles against the ontology.
pub fn validate_rules(rules: &[HornRule], ontology: &Ontology) -> Result<(), ConvertError> {
    for r in rules {
        for atom in r.antecedents.iter().chain(std::iter::once(&r.consequent)) {
            validate_atom(atom, ontology)?;
        }
    }
    Ok(())
}

pub fn validate_atom(atom: &Atom, ontology: &Ontology) -> Result<(), ConvertError> {
    let known = |role: &str| -> Result<bool, ConvertError> {
        if let Some(roles) = builtin_roles(&atom.pred) {
            return Ok(roles.contains(&role));
        }
        let roles = ontology
            .resolve_roles(&atom.pred)
            .map_err(|_| ConvertError::UnknownPredicate(atom.pred.clone()))?;
        Ok(roles.iter().any(|r| r.name == role))
    };
    if builtin_roles(&atom.pred).is_none() && !ontology.contains(&atom.pred) {
        return Err(ConvertError::UnknownPredicate(atom.pred.clone()));
    }
    for role in atom.args.keys() {
        if !known(role)? {
            return Err(ConvertError::UnknownRole {
                pred: atom.pred.clone(),
                role: role.clone(),
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Json,
    LogicText,
}

pub fn export(rules: &[HornRule], format: ExportFormat) -> String {
    match format {
        ExportFormat::Json => {
            let doc = RuleSet {
                version: RULES_VERSION,
                rules: rules.to_vec(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("rules serialize");
            s.push('\n');
            s
        }
        ExportFormat::LogicText => {
            let mut out = String::new();
            for r in rules {
                writeln!(out, "{}", render_rule(r)).expect("write to string");
            }
            out
        }
    }
}

pub fn load_rules(src: &str) -> Result<RuleSet, ConvertError> {
    serde_json::from_str(src).map_err(|e| ConvertError::Parse(e.to_string()))
}

fn render_term(t: &Term) -> String {
    match t {
        Term::Var { var, .. } => var.clone(),
        Term::Text { text, var } => format!("{var}<{text:?}>"),
        Term::Const { value } => {
            if value
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
                && !value.is_empty()
            {
                value.clone()
            } else {
                format!("{value:?}")
            }
        }
    }
}

pub fn render_atom(a: &Atom) -> String {
    let args: Vec<String> = a
        .args
        .iter()
        .filter(|(role, _)| role.as_str() != "focal")
        .map(|(role, t)| format!("{role}: {}", render_term(t)))
        .collect();
    let event = a
        .event
        .as_ref()
        .map(|e| format!("[{e}]"))
        .unwrap_or_default();
    let neg = if a.negated { "not " } else { "" };
    format!("{neg}{}{event}({})", a.pred, args.join(", "))
}

/// `often: help(helper: V1, ...) => thank(...).`
pub fn render_rule(r: &HornRule) -> String {
    let prefix = match r.modality {
        Modality::Often => "often: ",
        Modality::Always => "",
    };
    if r.antecedents.is_empty() {
        format!("{prefix}{}.", render_atom(&r.consequent))
    } else {
        let body: Vec<String> = r.antecedents.iter().map(render_atom).collect();
        format!(
            "{prefix}{} => {}.",
            body.join(", "),
            render_atom(&r.consequent)
        )
    }
}
