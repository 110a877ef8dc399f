//! Interactive refinement sessions.
//!
//! A session starts from a top-level template whose slots take free text.
//! Typing into a slot runs the recognizer and offers a micro-dialogue of
//! frame senses; choosing one turns the slot into a nested template whose
//! role slots are pre-filled from the interpretation. Any unstructured
//! filler can be refined the same way, or left as text.
//!
//! Sessions are event-sourced. Every state change is a [`SessionEvent`]
//! carrying the recognizer output it depended on, so a log replays to the
//! identical state without re-running the recognizer or touching the
//! correction log.

use std::collections::BTreeMap;
use std::sync::Arc;

use parking_lot::Mutex;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::warn;

use crate::ontology::{Ontology, OntologyError, RoleKind};
use crate::recognizer::{
    CorrectionLog, CorrectionRecord, ExternalParser, FrameInterpretation, Recognizer, StorageError,
};

#[derive(Debug, Error, PartialEq)]
pub enum SessionError {
    #[error("unknown template `{0}`")]
    UnknownTemplate(String),
    #[error("session is submitted and can no longer change")]
    SessionClosed,
    #[error("no slot at `{0}` in a state that allows this operation")]
    BadPath(String),
    #[error("frame `{frame}` was not offered for `{path}`")]
    OptionNotOffered { path: String, frame: String },
    #[error("slot `{0}` is required and cannot be deleted")]
    RequiredSlot(String),
    #[error("required slots still open: {}", .0.join(", "))]
    IncompleteEntry(Vec<String>),
    #[error("frame `{frame}` has no optional role `{role}` to add")]
    UnknownRole { frame: String, role: String },
    #[error("slot `{0}` already exists")]
    SlotExists(String),
    #[error("event log is malformed: {0}")]
    BadLog(String),
}

impl From<OntologyError> for SessionError {
    fn from(e: OntologyError) -> Self {
        SessionError::BadLog(e.to_string())
    }
}

/// How a submitted top-level template is read by the converter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionSemantics {
    CausalRule,
    TemporalSequence,
    Statement,
    PolicyStateDef,
    PolicyBranch,
    WorldFact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Text,
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSpec {
    pub name: String,
    pub kind: SlotKind,
    pub required: bool,
    /// Connective shown before the slot, e.g. "If".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateSpec {
    pub id: String,
    pub label: String,
    pub slots: Vec<SlotSpec>,
    pub construction_semantics: ConstructionSemantics,
}

fn text_slot(name: &str, label: Option<&str>, required: bool) -> SlotSpec {
    SlotSpec {
        name: name.into(),
        kind: SlotKind::Text,
        required,
        label: label.map(String::from),
    }
}

/// The bundled top-level templates: rule constructions, the SVO
/// statement, and the four policy-authoring templates.
pub fn builtin_templates() -> Vec<TemplateSpec> {
    use ConstructionSemantics::*;
    let t = |id: &str, label: &str, slots: Vec<SlotSpec>, cs| TemplateSpec {
        id: id.into(),
        label: label.into(),
        slots,
        construction_semantics: cs,
    };
    vec![
        t(
            "if_then",
            "If/Then",
            vec![
                text_slot("if", Some("If"), true),
                text_slot("then", Some("then"), true),
            ],
            CausalRule,
        ),
        t(
            "after_then",
            "After/Then",
            vec![
                text_slot("after", Some("After"), true),
                text_slot("then", Some("then"), true),
            ],
            TemporalSequence,
        ),
        t(
            "statement",
            "Statement",
            vec![text_slot("statement", None, true)],
            Statement,
        ),
        t(
            "compliance_state",
            "Compliance state",
            vec![text_slot("state", None, true)],
            PolicyStateDef,
        ),
        t(
            "intermediate_state",
            "Intermediate state",
            vec![
                text_slot("state", None, true),
                text_slot("condition", Some("when"), false),
            ],
            PolicyStateDef,
        ),
        t(
            "policy_branch",
            "Policy branch",
            vec![
                text_slot("if", Some("If"), true),
                text_slot("then", Some("then"), true),
            ],
            PolicyBranch,
        ),
        t(
            "world_fact",
            "World fact",
            vec![text_slot("fact", None, true)],
            WorldFact,
        ),
    ]
}

#[derive(Debug, Clone)]
pub struct TemplateRegistry {
    templates: BTreeMap<String, TemplateSpec>,
}

impl Default for TemplateRegistry {
    fn default() -> Self {
        TemplateRegistry::new(builtin_templates())
    }
}

impl TemplateRegistry {
    pub fn new(templates: Vec<TemplateSpec>) -> Self {
        TemplateRegistry {
            templates: templates.into_iter().map(|t| (t.id.clone(), t)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Result<&TemplateSpec, SessionError> {
        self.templates
            .get(id)
            .ok_or_else(|| SessionError::UnknownTemplate(id.to_string()))
    }

    pub fn all(&self) -> impl Iterator<Item = &TemplateSpec> {
        self.templates.values()
    }
}

/// One sense offered in a micro-dialogue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SenseOption {
    pub frame: String,
    pub gloss: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example: Option<String>,
    pub interpretation: FrameInterpretation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SlotState {
    Empty,
    Unstructured {
        text: String,
        /// The user chose to keep this filler as text.
        #[serde(rename = "final", default)]
        is_final: bool,
    },
    PendingDialogue {
        text: String,
        options: Vec<SenseOption>,
    },
    Structured {
        instance: Box<TemplateInstance>,
    },
}

impl SlotState {
    /// The raw text behind the slot, if any.
    pub fn text(&self) -> Option<&str> {
        match self {
            SlotState::Empty => None,
            SlotState::Unstructured { text, .. } | SlotState::PendingDialogue { text, .. } => {
                Some(text)
            }
            SlotState::Structured { instance } => Some(&instance.source_text),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub name: String,
    pub required: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub state: SlotState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateInstance {
    /// Frame id, or the template id for a session root.
    pub frame_id: String,
    pub trigger_text: String,
    /// Text the instance was recognized from.
    pub source_text: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negated: bool,
    pub slots: Vec<Slot>,
    /// The interpretation this instance came from; absent for a root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<FrameInterpretation>,
}

impl TemplateInstance {
    pub fn slot(&self, name: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.name == name)
    }

    /// Instances nested below this one, depth first.
    pub fn depth(&self) -> usize {
        1 + self
            .slots
            .iter()
            .filter_map(|s| match &s.state {
                SlotState::Structured { instance } => Some(instance.depth()),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Editing,
    Submitted,
}

/// A state change, with whatever recognizer output it consumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "snake_case")]
pub enum Command {
    Start {
        template: TemplateSpec,
    },
    InputText {
        path: String,
        text: String,
        interpretations: Vec<FrameInterpretation>,
    },
    ChooseSense {
        path: String,
        frame: String,
        suggested_roles: Vec<String>,
    },
    Refine {
        path: String,
        interpretations: Vec<FrameInterpretation>,
    },
    Leave {
        path: String,
    },
    DeleteSlot {
        path: String,
    },
    AddOptional {
        path: String,
        role: String,
    },
    Submit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionEvent {
    pub session: String,
    pub seq: u64,
    #[serde(flatten)]
    pub command: Command,
    pub ts: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub id: String,
    pub template: TemplateSpec,
    pub root: TemplateInstance,
    pub focus: String,
    pub status: Status,
    pub seq: u64,
    #[serde(skip)]
    pub log: Vec<SessionEvent>,
}

fn segments(path: &str) -> Result<Vec<&str>, SessionError> {
    let segs: Vec<&str> = path.split('.').collect();
    if segs.iter().any(|s| s.is_empty()) {
        return Err(SessionError::BadPath(path.to_string()));
    }
    Ok(segs)
}

fn join(parent: &str, name: &str) -> String {
    if parent.is_empty() {
        name.to_string()
    } else {
        format!("{parent}.{name}")
    }
}

fn instance_at<'a>(root: &'a TemplateInstance, path: &str) -> Option<&'a TemplateInstance> {
    if path.is_empty() {
        return Some(root);
    }
    let mut cur = root;
    for seg in path.split('.') {
        match &cur.slot(seg)?.state {
            SlotState::Structured { instance } => cur = instance,
            _ => return None,
        }
    }
    Some(cur)
}

fn instance_at_mut<'a>(
    root: &'a mut TemplateInstance,
    segs: &[&str],
) -> Option<&'a mut TemplateInstance> {
    let mut cur = root;
    for seg in segs {
        let slot = cur.slots.iter_mut().find(|s| s.name == *seg)?;
        match &mut slot.state {
            SlotState::Structured { instance } => cur = instance,
            _ => return None,
        }
    }
    Some(cur)
}

fn slot_at_mut<'a>(
    root: &'a mut TemplateInstance,
    path: &str,
) -> Result<&'a mut Slot, SessionError> {
    let bad = || SessionError::BadPath(path.to_string());
    let segs = segments(path)?;
    let (last, parents) = segs.split_last().ok_or_else(bad)?;
    let inst = instance_at_mut(root, parents).ok_or_else(bad)?;
    inst.slots
        .iter_mut()
        .find(|s| s.name == *last)
        .ok_or_else(bad)
}

/// Looks up the slot at a dot-separated path.
pub fn slot_at<'a>(root: &'a TemplateInstance, path: &str) -> Option<&'a Slot> {
    let (parent, name) = match path.rsplit_once('.') {
        Some((p, n)) => (p, n),
        None => ("", path),
    };
    instance_at(root, parent)?.slot(name)
}

/// Paths of required slots that are still empty or awaiting a sense choice.
pub fn open_required(root: &TemplateInstance) -> Vec<String> {
    fn walk(inst: &TemplateInstance, prefix: &str, out: &mut Vec<String>) {
        for s in &inst.slots {
            let path = join(prefix, &s.name);
            match &s.state {
                SlotState::Empty | SlotState::PendingDialogue { .. } if s.required => {
                    out.push(path)
                }
                SlotState::Structured { instance } => walk(instance, &path, out),
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    walk(root, "", &mut out);
    out
}

/// Every slot path in the tree, depth first.
pub fn all_paths(root: &TemplateInstance) -> Vec<String> {
    fn walk(inst: &TemplateInstance, prefix: &str, out: &mut Vec<String>) {
        for s in &inst.slots {
            let path = join(prefix, &s.name);
            out.push(path.clone());
            if let SlotState::Structured { instance } = &s.state {
                walk(instance, &path, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(root, "", &mut out);
    out
}

/// Builds the micro-dialogue options for `interpretations`, one per frame,
/// in recognizer order. Frames the ontology does not know are dropped.
pub fn build_options(
    ontology: &Ontology,
    interpretations: &[FrameInterpretation],
) -> Vec<SenseOption> {
    let mut out: Vec<SenseOption> = Vec::new();
    for interp in interpretations {
        if out.iter().any(|o| o.frame == interp.frame_id) {
            continue;
        }
        let Some(frame) = ontology.get(&interp.frame_id) else {
            continue;
        };
        out.push(SenseOption {
            frame: frame.id.clone(),
            gloss: frame.gloss.clone(),
            example: frame.examples.first().map(|e| e.text.clone()),
            interpretation: interp.clone(),
        });
    }
    out
}

/// Creates the nested template for a chosen interpretation of `text`.
pub fn instantiate(
    ontology: &Ontology,
    text: &str,
    interp: &FrameInterpretation,
    suggested_roles: &[String],
) -> Result<TemplateInstance, OntologyError> {
    let mut slots = Vec::new();
    for role in ontology
        .resolve_roles(&interp.frame_id)?
        .iter()
        .filter(|r| !r.is_focal())
    {
        let required = role.kind == RoleKind::Required;
        let state = if let Some(span) = interp.role_bindings.get(&role.name) {
            SlotState::Unstructured {
                text: span.slice(text).to_string(),
                is_final: false,
            }
        } else if required || suggested_roles.contains(&role.name) {
            SlotState::Empty
        } else {
            continue;
        };
        slots.push(Slot {
            name: role.name.clone(),
            required,
            label: None,
            state,
        });
    }
    Ok(TemplateInstance {
        frame_id: interp.frame_id.clone(),
        trigger_text: interp.trigger_span.slice(text).to_string(),
        source_text: text.to_string(),
        negated: interp.negated,
        slots,
        origin: Some(interp.clone()),
    })
}

impl Session {
    fn root_for(template: &TemplateSpec) -> TemplateInstance {
        TemplateInstance {
            frame_id: template.id.clone(),
            trigger_text: String::new(),
            source_text: String::new(),
            negated: false,
            slots: template
                .slots
                .iter()
                .map(|s| Slot {
                    name: s.name.clone(),
                    required: s.required,
                    label: s.label.clone(),
                    state: SlotState::Empty,
                })
                .collect(),
            origin: None,
        }
    }

    /// Creates a session from its opening event.
    pub fn start(id: impl Into<String>, template: TemplateSpec, ts: impl Into<String>) -> Session {
        let id = id.into();
        let focus = template
            .slots
            .first()
            .map(|s| s.name.clone())
            .unwrap_or_default();
        let root = Self::root_for(&template);
        let event = SessionEvent {
            session: id.clone(),
            seq: 1,
            command: Command::Start {
                template: template.clone(),
            },
            ts: ts.into(),
        };
        Session {
            id,
            template,
            root,
            focus,
            status: Status::Editing,
            seq: 1,
            log: vec![event],
        }
    }

    /// Rebuilds a session from its event log.
    pub fn replay(events: &[SessionEvent], ontology: &Ontology) -> Result<Session, SessionError> {
        let first = events
            .first()
            .ok_or_else(|| SessionError::BadLog("empty log".into()))?;
        let Command::Start { template } = &first.command else {
            return Err(SessionError::BadLog("log must open with start".into()));
        };
        let mut s = Session::start(first.session.clone(), template.clone(), first.ts.clone());
        for ev in &events[1..] {
            if ev.seq != s.seq + 1 || ev.session != s.id {
                return Err(SessionError::BadLog(format!(
                    "unexpected event seq {} for {}",
                    ev.seq, ev.session
                )));
            }
            s.apply(ev.command.clone(), ev.ts.clone(), ontology)?;
        }
        Ok(s)
    }

    pub fn slot(&self, path: &str) -> Option<&Slot> {
        slot_at(&self.root, path)
    }

    pub fn ensure_editing(&self) -> Result<(), SessionError> {
        match self.status {
            Status::Editing => Ok(()),
            Status::Submitted => Err(SessionError::SessionClosed),
        }
    }

    /// Validates and applies `command`, appending it to the log. On error
    /// the session is unchanged.
    pub fn apply(
        &mut self,
        command: Command,
        ts: String,
        ontology: &Ontology,
    ) -> Result<(), SessionError> {
        self.ensure_editing()?;
        let mut next = self.root.clone();
        let focus = match &command {
            Command::Start { .. } => {
                return Err(SessionError::BadLog("start inside a session".into()))
            }
            Command::InputText {
                path,
                text,
                interpretations,
            } => {
                let slot = slot_at_mut(&mut next, path)?;
                slot.state = dialogue_state(ontology, text, interpretations);
                path.clone()
            }
            Command::Refine {
                path,
                interpretations,
            } => {
                let slot = slot_at_mut(&mut next, path)?;
                let SlotState::Unstructured { text, .. } = &slot.state else {
                    return Err(SessionError::BadPath(path.clone()));
                };
                slot.state = dialogue_state(ontology, &text.clone(), interpretations);
                path.clone()
            }
            Command::ChooseSense {
                path,
                frame,
                suggested_roles,
            } => {
                let slot = slot_at_mut(&mut next, path)?;
                let SlotState::PendingDialogue { text, options } = &slot.state else {
                    return Err(SessionError::OptionNotOffered {
                        path: path.clone(),
                        frame: frame.clone(),
                    });
                };
                let option = options.iter().find(|o| &o.frame == frame).ok_or_else(|| {
                    SessionError::OptionNotOffered {
                        path: path.clone(),
                        frame: frame.clone(),
                    }
                })?;
                let instance =
                    instantiate(ontology, text, &option.interpretation, suggested_roles)?;
                let first_open = instance
                    .slots
                    .iter()
                    .find(|s| s.required && s.state == SlotState::Empty)
                    .map(|s| join(path, &s.name));
                slot.state = SlotState::Structured {
                    instance: Box::new(instance),
                };
                first_open.unwrap_or_else(|| path.clone())
            }
            Command::Leave { path } => {
                let slot = slot_at_mut(&mut next, path)?;
                slot.state = match &slot.state {
                    SlotState::Unstructured { text, .. }
                    | SlotState::PendingDialogue { text, .. } => SlotState::Unstructured {
                        text: text.clone(),
                        is_final: true,
                    },
                    _ => return Err(SessionError::BadPath(path.clone())),
                };
                path.clone()
            }
            Command::DeleteSlot { path } => {
                let segs = segments(path)?;
                let (last, parents) = segs.split_last().expect("non-empty");
                let inst = instance_at_mut(&mut next, parents)
                    .ok_or_else(|| SessionError::BadPath(path.clone()))?;
                let idx = inst
                    .slots
                    .iter()
                    .position(|s| s.name == *last)
                    .ok_or_else(|| SessionError::BadPath(path.clone()))?;
                if inst.slots[idx].required {
                    return Err(SessionError::RequiredSlot(path.clone()));
                }
                inst.slots.remove(idx);
                let parent = parents.join(".");
                match inst.slots.first() {
                    Some(s) => join(&parent, &s.name),
                    None if !parent.is_empty() => parent,
                    None => String::new(),
                }
            }
            Command::AddOptional { path, role } => {
                let segs: Vec<&str> = if path.is_empty() {
                    Vec::new()
                } else {
                    segments(path)?
                };
                let inst = instance_at_mut(&mut next, &segs)
                    .ok_or_else(|| SessionError::BadPath(path.clone()))?;
                let frame = inst.frame_id.clone();
                let unknown = || SessionError::UnknownRole {
                    frame: frame.clone(),
                    role: role.clone(),
                };
                let roles = ontology
                    .resolve_roles(&inst.frame_id)
                    .map_err(|_| unknown())?;
                let spec = roles
                    .iter()
                    .find(|r| &r.name == role && r.kind == RoleKind::Optional)
                    .ok_or_else(unknown)?;
                if inst.slot(role).is_some() {
                    return Err(SessionError::SlotExists(join(path, role)));
                }
                // keep resolve order among present slots
                let rank = |name: &str| {
                    roles
                        .iter()
                        .position(|r| r.name == name)
                        .unwrap_or(usize::MAX)
                };
                let my_rank = rank(&spec.name);
                let at = inst
                    .slots
                    .iter()
                    .position(|s| rank(&s.name) > my_rank)
                    .unwrap_or(inst.slots.len());
                inst.slots.insert(
                    at,
                    Slot {
                        name: role.clone(),
                        required: false,
                        label: None,
                        state: SlotState::Empty,
                    },
                );
                join(path, role)
            }
            Command::Submit => {
                let open = open_required(&next);
                if !open.is_empty() {
                    return Err(SessionError::IncompleteEntry(open));
                }
                self.status = Status::Submitted;
                self.focus.clone()
            }
        };
        self.root = next;
        if !focus.is_empty() {
            self.focus = focus;
        }
        self.seq += 1;
        self.log.push(SessionEvent {
            session: self.id.clone(),
            seq: self.seq,
            command,
            ts,
        });
        Ok(())
    }
}

fn dialogue_state(
    ontology: &Ontology,
    text: &str,
    interpretations: &[FrameInterpretation],
) -> SlotState {
    let options = build_options(ontology, interpretations);
    if options.is_empty() {
        SlotState::Unstructured {
            text: text.to_string(),
            is_final: false,
        }
    } else {
        SlotState::PendingDialogue {
            text: text.to_string(),
            options,
        }
    }
}

/// Time source for event timestamps.
pub trait Clock: Send + Sync {
    fn now(&self) -> String;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> String {
        chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
    }
}

/// Always reports the same instant.
#[derive(Debug, Clone)]
pub struct FixedClock(pub String);

impl Clock for FixedClock {
    fn now(&self) -> String {
        self.0.clone()
    }
}

/// Session id source. Ids carry 128 random bits.
pub trait IdSource: Send + Sync {
    fn next_id(&self) -> String;
}

fn hex_id(bytes: [u8; 16]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Default)]
pub struct RandomIds;

impl IdSource for RandomIds {
    fn next_id(&self) -> String {
        hex_id(rand::rng().random())
    }
}

/// Reproducible ids from a seeded generator.
#[derive(Debug)]
pub struct SeededIds(Mutex<ChaCha20Rng>);

impl SeededIds {
    pub fn new(seed: u64) -> Self {
        SeededIds(Mutex::new(ChaCha20Rng::seed_from_u64(seed)))
    }
}

impl IdSource for SeededIds {
    fn next_id(&self) -> String {
        let mut bytes = [0u8; 16];
        self.0.lock().fill_bytes(&mut bytes);
        hex_id(bytes)
    }
}

/// Drives sessions: runs the recognizer for each step, records the
/// outcome as an event and emits correction records.
pub struct Engine {
    recognizer: Arc<Recognizer>,
    external: Option<Arc<dyn ExternalParser>>,
    templates: TemplateRegistry,
    clock: Arc<dyn Clock>,
    corrections: Option<Arc<CorrectionLog>>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("recognizer", &self.recognizer)
            .field("external", &self.external.is_some())
            .finish()
    }
}

impl Engine {
    pub fn new(recognizer: Arc<Recognizer>) -> Self {
        Engine {
            recognizer,
            external: None,
            templates: TemplateRegistry::default(),
            clock: Arc::new(SystemClock),
            corrections: None,
        }
    }

    pub fn with_external(mut self, external: Option<Arc<dyn ExternalParser>>) -> Self {
        self.external = external;
        self
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_corrections(mut self, log: Option<Arc<CorrectionLog>>) -> Self {
        self.corrections = log;
        self
    }

    pub fn with_templates(mut self, templates: TemplateRegistry) -> Self {
        self.templates = templates;
        self
    }

    pub fn recognizer(&self) -> &Arc<Recognizer> {
        &self.recognizer
    }

    pub fn external(&self) -> Option<&dyn ExternalParser> {
        self.external.as_deref()
    }

    pub fn templates(&self) -> &TemplateRegistry {
        &self.templates
    }

    pub fn ontology(&self) -> &Ontology {
        self.recognizer.ontology()
    }

    pub fn start(&self, id: impl Into<String>, template: &str) -> Result<Session, SessionError> {
        let spec = self.templates.get(template)?.clone();
        Ok(Session::start(id, spec, self.clock.now()))
    }

    pub fn replay(&self, events: &[SessionEvent]) -> Result<Session, SessionError> {
        Session::replay(events, self.ontology())
    }

    fn parse(&self, text: &str) -> Vec<FrameInterpretation> {
        let mut out = self.recognizer.parse(text, self.external());
        out.truncate(self.recognizer.config().k.max(1));
        out
    }

    fn options_at(session: &Session, path: &str) -> Vec<SenseOption> {
        match session.slot(path).map(|s| &s.state) {
            Some(SlotState::PendingDialogue { options, .. }) => options.clone(),
            _ => Vec::new(),
        }
    }

    /// Types `text` into a slot and returns the sense options offered.
    pub fn input_text(
        &self,
        session: &mut Session,
        path: &str,
        text: &str,
    ) -> Result<Vec<SenseOption>, SessionError> {
        session.ensure_editing()?;
        if session.slot(path).is_none() {
            return Err(SessionError::BadPath(path.to_string()));
        }
        let interpretations = self.parse(text);
        let cmd = Command::InputText {
            path: path.into(),
            text: text.into(),
            interpretations,
        };
        session.apply(cmd, self.clock.now(), self.ontology())?;
        Ok(Self::options_at(session, path))
    }

    /// Re-opens an unstructured filler for interpretation.
    pub fn refine(
        &self,
        session: &mut Session,
        path: &str,
    ) -> Result<Vec<SenseOption>, SessionError> {
        session.ensure_editing()?;
        let text = match session.slot(path).map(|s| &s.state) {
            Some(SlotState::Unstructured { text, .. }) => text.clone(),
            _ => return Err(SessionError::BadPath(path.to_string())),
        };
        let interpretations = self.parse(&text);
        session.apply(
            Command::Refine {
                path: path.into(),
                interpretations,
            },
            self.clock.now(),
            self.ontology(),
        )?;
        Ok(Self::options_at(session, path))
    }

    /// Commits a sense and returns the resulting nested template.
    pub fn choose_sense(
        &self,
        session: &mut Session,
        path: &str,
        frame: &str,
    ) -> Result<TemplateInstance, SessionError> {
        session.ensure_editing()?;
        let not_offered = || SessionError::OptionNotOffered {
            path: path.into(),
            frame: frame.into(),
        };
        let (text, options) = match session.slot(path).map(|s| &s.state) {
            Some(SlotState::PendingDialogue { text, options }) => (text.clone(), options.clone()),
            Some(_) => return Err(not_offered()),
            None => return Err(SessionError::BadPath(path.to_string())),
        };
        let chosen = options
            .iter()
            .find(|o| o.frame == frame)
            .ok_or_else(not_offered)?;
        let tokens = self.recognizer.analyze(&text);
        let suggested_roles = self
            .recognizer
            .context_roles(frame, &tokens)
            .unwrap_or_default();
        let cmd = Command::ChooseSense {
            path: path.into(),
            frame: frame.into(),
            suggested_roles,
        };
        session.apply(cmd, self.clock.now(), self.ontology())?;

        let rejected: Vec<String> = options
            .iter()
            .filter(|o| o.frame != frame)
            .map(|o| o.frame.clone())
            .collect();
        if let Err(e) = self.record_correction(&text, &chosen.interpretation, rejected) {
            warn!("correction not recorded: {e}");
        }
        match session.slot(path).map(|s| &s.state) {
            Some(SlotState::Structured { instance }) => Ok((**instance).clone()),
            _ => unreachable!("choose_sense leaves a structured slot"),
        }
    }

    /// Appends a confirmed interpretation to the correction log, if one is
    /// configured.
    pub fn record_correction(
        &self,
        text: &str,
        chosen: &FrameInterpretation,
        rejected: Vec<String>,
    ) -> Result<Option<CorrectionRecord>, StorageError> {
        let Some(log) = &self.corrections else {
            return Ok(None);
        };
        let record = CorrectionRecord::new(text, chosen, rejected, self.clock.now())?;
        log.append(&record)?;
        Ok(Some(record))
    }

    pub fn leave_unstructured(
        &self,
        session: &mut Session,
        path: &str,
    ) -> Result<(), SessionError> {
        session.apply(
            Command::Leave { path: path.into() },
            self.clock.now(),
            self.ontology(),
        )
    }

    pub fn delete_optional_slot(
        &self,
        session: &mut Session,
        path: &str,
    ) -> Result<(), SessionError> {
        session.apply(
            Command::DeleteSlot { path: path.into() },
            self.clock.now(),
            self.ontology(),
        )
    }

    /// Adds an empty optional role slot to the instance at `path`.
    pub fn add_optional_slot(
        &self,
        session: &mut Session,
        path: &str,
        role: &str,
    ) -> Result<(), SessionError> {
        session.apply(
            Command::AddOptional {
                path: path.into(),
                role: role.into(),
            },
            self.clock.now(),
            self.ontology(),
        )
    }

    /// Freezes the entry and returns its root instance.
    pub fn submit(&self, session: &mut Session) -> Result<TemplateInstance, SessionError> {
        session.apply(Command::Submit, self.clock.now(), self.ontology())?;
        Ok(session.root.clone())
    }
}
