//! Frame ontology: definitions, trigger lexicon, role inheritance and
//! subsumption.
//!
//! The on-disk format is a single JSON document:
//!
//! ```json
//! {"frames": [{"id": "taking", "gloss": "...", "pos": "verb",
//!              "triggers": ["take"], "parents": ["event"],
//!              "roles": [{"name": "agent", "kind": "required", "type_hint": null, "examples": ["the boy"]}],
//!              "examples": [{"text": "...", "trigger": [4, 9], "roles": {"agent": [0, 3]}}]}]}
//! ```
//!
//! Spans are half-open character offsets. An [`Ontology`] is immutable once
//! loaded.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Read;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::CharSpan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoleKind {
    Focal,
    Required,
    Optional,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleSpec {
    pub name: String,
    pub kind: RoleKind,
    #[serde(default)]
    pub type_hint: Option<String>,
    /// Example filler phrases used to infer the role's expected type.
    #[serde(default, rename = "examples")]
    pub example_fillers: Vec<String>,
}

impl RoleSpec {
    pub fn is_focal(&self) -> bool {
        self.kind == RoleKind::Focal
    }
}

/// Syntactic category of the frame's trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartOfSpeech {
    Verb,
    Noun,
    Adj,
    /// Clause coordinator; its arguments are whole clauses.
    Conj,
}

/// Builtin comparison predicates a frame can lower to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builtin {
    Gt,
    Lt,
    Eq,
}

impl Builtin {
    pub fn predicate(self) -> &'static str {
        match self {
            Builtin::Gt => "gt",
            Builtin::Lt => "lt",
            Builtin::Eq => "eq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedExample {
    pub text: String,
    pub trigger: CharSpan,
    #[serde(default)]
    pub roles: IndexMap<String, CharSpan>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameDef {
    pub id: String,
    #[serde(default)]
    pub gloss: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pos: Option<PartOfSpeech>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<Builtin>,
    #[serde(default, rename = "triggers")]
    pub trigger_lemmas: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    #[serde(default)]
    pub roles: Vec<RoleSpec>,
    #[serde(default)]
    pub examples: Vec<AnnotatedExample>,
}

impl FrameDef {
    pub fn is_verbal(&self) -> bool {
        self.pos == Some(PartOfSpeech::Verb)
    }

    /// Nominal frames (or frames with no declared category) head noun
    /// phrases rather than clauses.
    pub fn is_nominal(&self) -> bool {
        matches!(self.pos, None | Some(PartOfSpeech::Noun))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct OntologyDoc {
    frames: Vec<FrameDef>,
}

/// One structural defect found while validating an ontology document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum ValidationIssue {
    DuplicateId {
        frame: String,
    },
    DanglingParent {
        frame: String,
        parent: String,
    },
    InheritanceCycle {
        path: Vec<String>,
    },
    FocalRole {
        frame: String,
        count: usize,
    },
    DuplicateRole {
        frame: String,
        role: String,
    },
    UnknownExampleRole {
        frame: String,
        example: usize,
        role: String,
    },
    SpanOutOfBounds {
        frame: String,
        example: usize,
    },
    NoTriggers {
        frame: String,
    },
}

impl std::fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationIssue::DuplicateId { frame } => write!(f, "duplicate frame id `{frame}`"),
            ValidationIssue::DanglingParent { frame, parent } => {
                write!(f, "frame `{frame}` names unknown parent `{parent}`")
            }
            ValidationIssue::InheritanceCycle { path } => {
                write!(f, "inheritance cycle: {}", path.join(" -> "))
            }
            ValidationIssue::FocalRole { frame, count } => {
                write!(
                    f,
                    "frame `{frame}` resolves to {count} focal roles, expected exactly 1"
                )
            }
            ValidationIssue::DuplicateRole { frame, role } => {
                write!(f, "frame `{frame}` declares role `{role}` twice")
            }
            ValidationIssue::UnknownExampleRole {
                frame,
                example,
                role,
            } => {
                write!(
                    f,
                    "example {example} of `{frame}` annotates unknown role `{role}`"
                )
            }
            ValidationIssue::SpanOutOfBounds { frame, example } => {
                write!(
                    f,
                    "example {example} of `{frame}` has a span outside its text"
                )
            }
            ValidationIssue::NoTriggers { frame } => {
                write!(f, "frame `{frame}` has no trigger lemmas")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum OntologyError {
    #[error("ontology parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("ontology validation failed: {}", .0.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("; "))]
    Validation(Vec<ValidationIssue>),
    #[error("unknown frame `{0}`")]
    UnknownFrame(String),
    #[error("i/o error reading ontology: {0}")]
    Io(#[from] std::io::Error),
}

/// Normalizes a trigger phrase: lowercase, single spaces.
pub fn normalize_trigger(t: &str) -> String {
    t.split_whitespace()
        .map(str::to_lowercase)
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone)]
pub struct Ontology {
    frames: Vec<FrameDef>,
    by_id: HashMap<String, usize>,
    trigger_index: BTreeMap<String, BTreeSet<String>>,
    resolved: HashMap<String, Vec<RoleSpec>>,
    max_trigger_words: usize,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.frames == other.frames && self.trigger_index == other.trigger_index
    }
}

impl Ontology {
    pub fn empty() -> Self {
        Ontology::from_frames(Vec::new()).expect("empty ontology is valid")
    }

    /// Validates `frames` and builds the trigger index.
    pub fn from_frames(mut frames: Vec<FrameDef>) -> Result<Self, OntologyError> {
        for f in &mut frames {
            let mut seen = HashSet::new();
            f.trigger_lemmas = f
                .trigger_lemmas
                .iter()
                .map(|t| normalize_trigger(t))
                .filter(|t| !t.is_empty() && seen.insert(t.clone()))
                .collect();
        }

        let mut issues = Vec::new();
        let mut by_id = HashMap::new();
        for (i, f) in frames.iter().enumerate() {
            if by_id.insert(f.id.clone(), i).is_some() {
                issues.push(ValidationIssue::DuplicateId {
                    frame: f.id.clone(),
                });
            }
        }
        for f in &frames {
            if f.trigger_lemmas.is_empty() {
                issues.push(ValidationIssue::NoTriggers {
                    frame: f.id.clone(),
                });
            }
            for p in &f.parents {
                if !by_id.contains_key(p) {
                    issues.push(ValidationIssue::DanglingParent {
                        frame: f.id.clone(),
                        parent: p.clone(),
                    });
                }
            }
            let mut names = HashSet::new();
            for r in &f.roles {
                if !names.insert(r.name.as_str()) {
                    issues.push(ValidationIssue::DuplicateRole {
                        frame: f.id.clone(),
                        role: r.name.clone(),
                    });
                }
            }
        }
        if !issues.is_empty() {
            return Err(OntologyError::Validation(issues));
        }
        if let Some(path) = find_cycle(&frames, &by_id) {
            return Err(OntologyError::Validation(vec![
                ValidationIssue::InheritanceCycle { path },
            ]));
        }

        let mut resolved = HashMap::new();
        for f in &frames {
            let roles = resolve_in(&frames, &by_id, &f.id);
            let focal = roles.iter().filter(|r| r.is_focal()).count();
            if focal != 1 {
                issues.push(ValidationIssue::FocalRole {
                    frame: f.id.clone(),
                    count: focal,
                });
            }
            for (ei, ex) in f.examples.iter().enumerate() {
                let len = ex.text.chars().count();
                let in_bounds = |s: &CharSpan| s.start <= s.end && s.end <= len;
                if !in_bounds(&ex.trigger) || !ex.roles.values().all(in_bounds) {
                    issues.push(ValidationIssue::SpanOutOfBounds {
                        frame: f.id.clone(),
                        example: ei,
                    });
                }
                for role in ex.roles.keys() {
                    if !roles.iter().any(|r| &r.name == role) {
                        issues.push(ValidationIssue::UnknownExampleRole {
                            frame: f.id.clone(),
                            example: ei,
                            role: role.clone(),
                        });
                    }
                }
            }
            resolved.insert(f.id.clone(), roles);
        }
        if !issues.is_empty() {
            return Err(OntologyError::Validation(issues));
        }

        let mut trigger_index: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        let mut max_trigger_words = 0;
        for f in &frames {
            for t in &f.trigger_lemmas {
                max_trigger_words = max_trigger_words.max(t.split(' ').count());
                trigger_index
                    .entry(t.clone())
                    .or_default()
                    .insert(f.id.clone());
            }
        }
        Ok(Ontology {
            frames,
            by_id,
            trigger_index,
            resolved,
            max_trigger_words,
        })
    }

    pub fn frames(&self) -> &[FrameDef] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, id: &str) -> Result<&FrameDef, OntologyError> {
        self.get(id)
            .ok_or_else(|| OntologyError::UnknownFrame(id.to_string()))
    }

    pub fn get(&self, id: &str) -> Option<&FrameDef> {
        self.by_id.get(id).map(|&i| &self.frames[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    pub fn trigger_index(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.trigger_index
    }

    /// Longest trigger phrase length, in words.
    pub fn max_trigger_words(&self) -> usize {
        self.max_trigger_words
    }

    /// Own roles first, then ancestors' roles depth-first in parent order;
    /// the first declaration of a name wins.
    pub fn resolve_roles(&self, frame_id: &str) -> Result<&[RoleSpec], OntologyError> {
        self.resolved
            .get(frame_id)
            .map(Vec::as_slice)
            .ok_or_else(|| OntologyError::UnknownFrame(frame_id.to_string()))
    }

    pub fn focal_role(&self, frame_id: &str) -> Result<&RoleSpec, OntologyError> {
        Ok(self
            .resolve_roles(frame_id)?
            .iter()
            .find(|r| r.is_focal())
            .expect("validated: one focal role per frame"))
    }

    pub fn role(&self, frame_id: &str, role: &str) -> Result<Option<&RoleSpec>, OntologyError> {
        Ok(self
            .resolve_roles(frame_id)?
            .iter()
            .find(|r| r.name == role))
    }

    /// Reflexive, transitive ancestry test.
    pub fn subsumes(&self, ancestor: &str, descendant: &str) -> Result<bool, OntologyError> {
        self.frame(ancestor)?;
        self.frame(descendant)?;
        let mut stack = vec![descendant];
        let mut seen = HashSet::new();
        while let Some(id) = stack.pop() {
            if id == ancestor {
                return Ok(true);
            }
            if seen.insert(id) {
                stack.extend(self.frame(id)?.parents.iter().map(String::as_str));
            }
        }
        Ok(false)
    }

    /// Frames evoked by `lemma`; case-insensitive, unknown lemmas yield an
    /// empty set.
    pub fn lookup_triggers(&self, lemma: &str) -> BTreeSet<String> {
        self.trigger_index
            .get(&normalize_trigger(lemma))
            .cloned()
            .unwrap_or_default()
    }

    /// Returns a new ontology with `extra` examples appended to their frames.
    pub fn with_examples<'a, I>(&self, extra: I) -> Result<Ontology, OntologyError>
    where
        I: IntoIterator<Item = (&'a str, AnnotatedExample)>,
    {
        let mut frames = self.frames.clone();
        for (frame_id, ex) in extra {
            let i = *self
                .by_id
                .get(frame_id)
                .ok_or_else(|| OntologyError::UnknownFrame(frame_id.to_string()))?;
            frames[i].examples.push(ex);
        }
        Ontology::from_frames(frames)
    }

    pub fn to_json(&self) -> String {
        let doc = OntologyDoc {
            frames: self.frames.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("ontology serializes")
    }
}

fn resolve_in(frames: &[FrameDef], by_id: &HashMap<String, usize>, id: &str) -> Vec<RoleSpec> {
    fn walk(
        frames: &[FrameDef],
        by_id: &HashMap<String, usize>,
        id: &str,
        visited: &mut HashSet<String>,
        out: &mut Vec<RoleSpec>,
    ) {
        if !visited.insert(id.to_string()) {
            return;
        }
        let f = &frames[by_id[id]];
        for r in &f.roles {
            if !out.iter().any(|o| o.name == r.name) {
                out.push(r.clone());
            }
        }
        for p in &f.parents {
            walk(frames, by_id, p, visited, out);
        }
    }
    let mut out = Vec::new();
    walk(frames, by_id, id, &mut HashSet::new(), &mut out);
    out
}

fn find_cycle(frames: &[FrameDef], by_id: &HashMap<String, usize>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(
        i: usize,
        frames: &[FrameDef],
        by_id: &HashMap<String, usize>,
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<String>> {
        marks[i] = Mark::Active;
        stack.push(i);
        for p in &frames[i].parents {
            let j = by_id[p];
            match marks[j] {
                Mark::Active => {
                    let pos = stack.iter().position(|&s| s == j).unwrap();
                    let mut path: Vec<String> =
                        stack[pos..].iter().map(|&s| frames[s].id.clone()).collect();
                    path.push(frames[j].id.clone());
                    return Some(path);
                }
                Mark::New => {
                    if let Some(c) = visit(j, frames, by_id, marks, stack) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[i] = Mark::Done;
        None
    }
    let mut marks = vec![Mark::New; frames.len()];
    for i in 0..frames.len() {
        if marks[i] == Mark::New {
            if let Some(c) = visit(i, frames, by_id, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}

/// Reads and validates an ontology document.
pub fn load_ontology<R: Read>(mut source: R) -> Result<Ontology, OntologyError> {
    let mut buf = String::new();
    source.read_to_string(&mut buf)?;
    parse_ontology(&buf)
}

pub fn parse_ontology(src: &str) -> Result<Ontology, OntologyError> {
    let doc: OntologyDoc = serde_json::from_str(src).map_err(|e| OntologyError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ontology::from_frames(doc.frames)
}
