//! Completion suggestions for the active slot, filtered so that only
//! completions whose re-parse keeps the committed frame survive.

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::cosine;
use crate::http::{JsonClient, EXTERNAL_TIMEOUT};
use crate::recognizer::{ExternalParser, Recognizer};
use crate::session::{slot_at, Session, SlotState};
use crate::text::{tokenize, CharSpan};

#[derive(Debug, Error, PartialEq)]
pub enum SuggestError {
    #[error("completion generator unavailable: {0}")]
    GeneratorUnavailable(String),
    #[error("max_n must be at least 1")]
    ZeroRequested,
    #[error("no slot at `{0}`")]
    BadPath(String),
}

pub const SEPARATOR: &str = " ";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionCandidate {
    /// The continuation only.
    pub text: String,
    /// Prior text, separator, continuation.
    pub full_text: String,
    pub score: f64,
}

impl CompletionCandidate {
    pub fn new(prior: &str, text: &str, score: f64) -> Self {
        let prior = prior.trim_end();
        let text = text.trim();
        CompletionCandidate {
            text: text.to_string(),
            full_text: format!("{prior}{SEPARATOR}{text}"),
            score,
        }
    }

    /// Character span of the continuation inside `full_text`.
    pub fn continuation_span(&self) -> CharSpan {
        let total = self.full_text.chars().count();
        CharSpan::new(total - self.text.chars().count(), total)
    }
}

pub trait Generator: Send + Sync {
    fn generate(&self, prior: &str, max_n: usize)
        -> Result<Vec<CompletionCandidate>, SuggestError>;
}

/// Deterministic stand-in for a generation model: corpus lines whose head
/// continues the end of the prior text, ranked by embedding similarity.
pub struct RetrievalGenerator<'a> {
    recognizer: &'a Recognizer,
    lines: Vec<String>,
}

impl<'a> RetrievalGenerator<'a> {
    pub fn new(recognizer: &'a Recognizer, lines: Vec<String>) -> Self {
        RetrievalGenerator { recognizer, lines }
    }

    /// Length of the longest run of words that ends `prior` and starts
    /// `line`, and the continuation after it.
    fn overlap(prior: &[String], line: &str) -> Option<String> {
        let toks = tokenize(line);
        let words: Vec<String> = toks.iter().map(|(w, _)| w.to_lowercase()).collect();
        let max = prior.len().min(words.len());
        let k = (1..=max)
            .rev()
            .find(|&k| prior[prior.len() - k..] == words[..k])?;
        let start = toks.get(k)?.1.start;
        let rest: String = line.chars().skip(start).collect();
        let rest = rest.trim().trim_end_matches(['.', '!', '?']).trim();
        (!rest.is_empty()).then(|| rest.to_string())
    }
}

impl Generator for RetrievalGenerator<'_> {
    fn generate(
        &self,
        prior: &str,
        max_n: usize,
    ) -> Result<Vec<CompletionCandidate>, SuggestError> {
        if max_n == 0 {
            return Err(SuggestError::ZeroRequested);
        }
        let prior_words: Vec<String> = tokenize(prior)
            .into_iter()
            .map(|(w, _)| w.to_lowercase())
            .collect();
        let prior_vec = self
            .recognizer
            .sentence_embedding(&self.recognizer.analyze(prior));
        let mut out: Vec<CompletionCandidate> = Vec::new();
        for line in &self.lines {
            let Some(cont) = Self::overlap(&prior_words, line) else {
                continue;
            };
            if out.iter().any(|c| c.text == cont) {
                continue;
            }
            let line_vec = self
                .recognizer
                .sentence_embedding(&self.recognizer.analyze(line));
            let score = cosine(&prior_vec, &line_vec).expect("shared dimension");
            out.push(CompletionCandidate::new(prior, &cont, score));
        }
        out.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.text.cmp(&b.text))
        });
        out.truncate(max_n);
        Ok(out)
    }
}

#[derive(Debug, Serialize)]
struct GenerateRequest<'a> {
    prior: &'a str,
    n: usize,
}

#[derive(Debug, Deserialize)]
struct WireCompletion {
    text: String,
    #[serde(default)]
    score: f64,
}

#[derive(Debug, Deserialize)]
struct GenerateResponse {
    completions: Vec<WireCompletion>,
}

/// Client for an external generation service.
#[derive(Debug, Clone)]
pub struct HttpGenerator {
    client: JsonClient,
}

impl HttpGenerator {
    pub fn new(url: impl Into<String>) -> Self {
        Self::with_timeout(url, EXTERNAL_TIMEOUT)
    }

    pub fn with_timeout(url: impl Into<String>, timeout: Duration) -> Self {
        HttpGenerator {
            client: JsonClient::new(url, timeout),
        }
    }
}

impl Generator for HttpGenerator {
    fn generate(
        &self,
        prior: &str,
        max_n: usize,
    ) -> Result<Vec<CompletionCandidate>, SuggestError> {
        if max_n == 0 {
            return Err(SuggestError::ZeroRequested);
        }
        let resp: GenerateResponse = self
            .client
            .post(&GenerateRequest { prior, n: max_n })
            .map_err(SuggestError::GeneratorUnavailable)?;
        let mut out: Vec<CompletionCandidate> = resp
            .completions
            .into_iter()
            .map(|c| CompletionCandidate::new(prior, &c.text, c.score))
            .collect();
        out.truncate(max_n);
        Ok(out)
    }
}

/// The frame and role a suggestion has to fit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Committed {
    pub frame: String,
    pub role: String,
}

/// Keeps candidates whose full text re-parses to the committed frame (or
/// a frame related to it by subsumption) with the continuation filling the
/// active role. Order is preserved; no committed frame keeps everything.
pub fn filter_compatible(
    recognizer: &Recognizer,
    external: Option<&dyn ExternalParser>,
    candidates: &[CompletionCandidate],
    committed: Option<&Committed>,
) -> Vec<CompletionCandidate> {
    let Some(committed) = committed else {
        return candidates.to_vec();
    };
    let ontology = recognizer.ontology();
    let related = |f: &str| {
        ontology.subsumes(&committed.frame, f).unwrap_or(false)
            || ontology.subsumes(f, &committed.frame).unwrap_or(false)
    };
    candidates
        .iter()
        .filter(|c| {
            let Some(top) = recognizer.parse(&c.full_text, external).into_iter().next() else {
                return false;
            };
            let cont = c.continuation_span();
            related(&top.frame_id)
                && top
                    .role_bindings
                    .get(&committed.role)
                    .is_some_and(|s| s.overlaps(&cont))
        })
        .cloned()
        .collect()
}

/// What the suggestion endpoint needs to know about the active slot.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotContext {
    pub prior: String,
    pub committed: Option<Committed>,
}

/// Works out the prior text and the committed frame for the slot at
/// `path`: the text of the instance that owns it, prefixed by the
/// top-level connective ("If", "After", ...).
pub fn slot_context(session: &Session, path: &str) -> Result<SlotContext, SuggestError> {
    let bad = || SuggestError::BadPath(path.to_string());
    let slot = slot_at(&session.root, path).ok_or_else(bad)?;
    let top = path.split('.').next().unwrap_or(path);
    let label = session.root.slot(top).and_then(|s| s.label.clone());
    let prefix = |text: &str| match &label {
        Some(l) if !text.to_lowercase().starts_with(&l.to_lowercase()) => format!("{l} {text}"),
        _ => text.to_string(),
    };
    match path.rsplit_once('.') {
        None => Ok(SlotContext {
            prior: prefix(slot.state.text().unwrap_or("")),
            committed: None,
        }),
        Some((parent, role)) => {
            let owner = slot_at(&session.root, parent).ok_or_else(bad)?;
            let SlotState::Structured { instance } = &owner.state else {
                return Err(bad());
            };
            let prior = if parent == top {
                prefix(&instance.source_text)
            } else {
                instance.source_text.clone()
            };
            Ok(SlotContext {
                prior,
                committed: Some(Committed {
                    frame: instance.frame_id.clone(),
                    role: role.to_string(),
                }),
            })
        }
    }
}

/// Generates and filters completions for a session slot.
pub fn suggest_for_slot(
    recognizer: &Recognizer,
    external: Option<&dyn ExternalParser>,
    generator: &dyn Generator,
    session: &Session,
    path: &str,
    max_n: usize,
) -> Result<Vec<CompletionCandidate>, SuggestError> {
    let ctx = slot_context(session, path)?;
    let candidates = generator.generate(&ctx.prior, max_n)?;
    Ok(filter_compatible(
        recognizer,
        external,
        &candidates,
        ctx.committed.as_ref(),
    ))
}
