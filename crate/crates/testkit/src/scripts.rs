//! Scripted authoring sessions: the cookie example and the five
//! commonsense rules used as coverage targets.

use skate_core::session::{Engine, Session, SessionError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Text { path: String, text: String },
    Refine { path: String },
    Choose { path: String, frame: String },
    Leave { path: String },
    Delete { path: String },
    AddOptional { path: String, role: String },
}

fn text(path: &str, text: &str) -> Step {
    Step::Text {
        path: path.into(),
        text: text.into(),
    }
}

fn refine(path: &str) -> Step {
    Step::Refine { path: path.into() }
}

fn choose(path: &str, frame: &str) -> Step {
    Step::Choose {
        path: path.into(),
        frame: frame.into(),
    }
}

fn leave(path: &str) -> Step {
    Step::Leave { path: path.into() }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    /// The knowledge the entry is meant to capture.
    pub target: String,
    pub template: String,
    pub steps: Vec<Step>,
}

pub const COOKIE: &str = "The child takes the cookie from the jar";

pub fn cookie() -> Script {
    Script {
        target: COOKIE.into(),
        template: "statement".into(),
        steps: vec![text("statement", COOKIE), choose("statement", "taking")],
    }
}

/// The five commonsense rules, each with the entry a user would make.
pub fn commonsense_rules() -> Vec<Script> {
    vec![
        Script {
            target: "People generally want to eat food that is tasty".into(),
            template: "statement".into(),
            steps: vec![
                text("statement", "Often people want to eat tasty food"),
                choose("statement", "wanting"),
                refine("statement.desired"),
                choose("statement.desired", "eating"),
                text("statement.desired.ingestor", "people"),
                leave("statement.desired.ingestor"),
                refine("statement.desired.ingestibles"),
                choose("statement.desired.ingestibles", "tasty"),
            ],
        },
        Script {
            target: "When a larger animal approaches a smaller animal, the smaller animal might get afraid".into(),
            template: "if_then".into(),
            steps: vec![
                text("if", "Often when animal1 approaches animal2 and size of animal1 is greater than size of animal2"),
                choose("if", "and"),
                refine("if.conjunct1"),
                choose("if.conjunct1", "approaching"),
                refine("if.conjunct2"),
                choose("if.conjunct2", "greater-than"),
                refine("if.conjunct2.left"),
                choose("if.conjunct2.left", "size"),
                refine("if.conjunct2.right"),
                choose("if.conjunct2.right", "size"),
                text("then", "animal2 feels fear"),
                choose("then", "feeling"),
            ],
        },
        Script {
            target: "When one person helps another, the person being helped thanks the helper".into(),
            template: "if_then".into(),
            steps: vec![
                text("if", "Often when person1 helps person2"),
                choose("if", "helping"),
                text("then", "person2 thanks person1"),
                choose("then", "thanking"),
            ],
        },
        Script {
            target: "If something is not obscured behind another object, it can be seen".into(),
            template: "if_then".into(),
            steps: vec![
                text("if", "If object1 does not cover object2"),
                choose("if", "covering"),
                text("then", "someone can see object2"),
                choose("then", "seeing"),
            ],
        },
        Script {
            target: "If someone doesn't know something, and someone else tells them, then they know what it is".into(),
            template: "if_then".into(),
            steps: vec![
                text("if", "If person1 does not know a fact and person2 tells person1 the fact"),
                choose("if", "and"),
                refine("if.conjunct1"),
                choose("if.conjunct1", "knowing"),
                refine("if.conjunct2"),
                choose("if.conjunct2", "telling"),
                text("then", "then person1 learns the fact"),
                choose("then", "learning"),
            ],
        },
    ]
}

/// Applies one step through the engine.
pub fn apply(engine: &Engine, session: &mut Session, step: &Step) -> Result<(), SessionError> {
    match step {
        Step::Text { path, text } => engine.input_text(session, path, text).map(drop),
        Step::Refine { path } => engine.refine(session, path).map(drop),
        Step::Choose { path, frame } => engine.choose_sense(session, path, frame).map(drop),
        Step::Leave { path } => engine.leave_unstructured(session, path),
        Step::Delete { path } => engine.delete_optional_slot(session, path),
        Step::AddOptional { path, role } => engine.add_optional_slot(session, path, role),
    }
}

/// Runs a script to completion without submitting.
pub fn run(engine: &Engine, id: &str, script: &Script) -> Result<Session, SessionError> {
    let mut s = engine.start(id, &script.template)?;
    for step in &script.steps {
        apply(engine, &mut s, step)?;
    }
    Ok(s)
}
