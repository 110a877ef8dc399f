//! Concept recognizer: trigger selection, kNN frame ranking, argument span
//! detection and role assignment, with an optional supervised parser in
//! front of it.
//!
//! The external parser is consulted first when configured. Its answer is
//! used unless it is empty, malformed, or its best confidence falls below
//! `low_confidence_threshold`; in those cases the embedding pipeline runs
//! on the text typed so far.

pub mod chunker;
pub mod correction;
pub mod external;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tracing::{debug, warn};

use crate::embedding::{cosine, EmbeddingStore, FrameEmbedding, Vector};
use crate::ontology::{Ontology, OntologyError, PartOfSpeech};
use crate::text::{Analyzer, CharSpan, TokenSeq};

pub use chunker::{BoundaryChunker, SpanAnalysis, SyntacticAnalyzer, TriggerCategory};
pub use correction::{CorrectionLog, CorrectionRecord, ExampleRecord, StorageError};
pub use external::{
    ExternalParser, HttpParserClient, ParseRequest, ParseResponse, StaticParser, WireInterpretation,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecognizerConfig {
    /// Frames returned per trigger.
    pub k: usize,
    /// External results whose best confidence is below this engage the
    /// kNN fallback.
    pub low_confidence_threshold: f64,
    /// Minimum span/role-type cosine for a role to be bound.
    pub role_similarity_floor: f64,
    /// Weight of the left/right-of-trigger agreement learned from
    /// annotated examples.
    pub side_weight: f64,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        RecognizerConfig {
            k: 3,
            low_confidence_threshold: 0.35,
            role_similarity_floor: 0.15,
            side_weight: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    External,
    Knn,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameInterpretation {
    #[serde(rename = "frame")]
    pub frame_id: String,
    #[serde(rename = "trigger")]
    pub trigger_span: CharSpan,
    #[serde(rename = "roles", default)]
    pub role_bindings: BTreeMap<String, CharSpan>,
    pub confidence: f64,
    pub source: Source,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub negated: bool,
}

/// The selected lexical trigger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trigger {
    pub lemma: String,
    pub span: CharSpan,
    #[serde(skip)]
    pub tokens: Range<usize>,
    #[serde(skip)]
    pub category: TriggerCategory,
}

#[derive(Debug, Error)]
pub enum RecognizerError {
    #[error("trigger `{0}` has no candidate frames")]
    NoCandidates(String),
    #[error(transparent)]
    Ontology(#[from] OntologyError),
}

fn category_of(
    ontology: &Ontology,
    frames: &std::collections::BTreeSet<String>,
) -> (TriggerCategory, bool) {
    let pos: Vec<Option<PartOfSpeech>> = frames
        .iter()
        .filter_map(|f| ontology.get(f))
        .map(|f| f.pos)
        .collect();
    let verbal = pos.contains(&Some(PartOfSpeech::Verb));
    let cat = if pos.contains(&Some(PartOfSpeech::Conj)) {
        TriggerCategory::Clausal
    } else if pos
        .iter()
        .any(|p| matches!(p, Some(PartOfSpeech::Verb) | Some(PartOfSpeech::Adj)))
    {
        TriggerCategory::Predicate
    } else {
        TriggerCategory::Nominal
    };
    (cat, verbal)
}

/// Picks the trigger with the widest syntactic scope.
///
/// A coordinator joining two predicate-bearing clauses wins outright.
/// Otherwise: longest multiword trigger, then verbal over non-verbal, then
/// leftmost.
pub fn select_trigger(ontology: &Ontology, tokens: &TokenSeq) -> Option<Trigger> {
    struct Cand {
        trigger: Trigger,
        words: usize,
        verbal: bool,
    }
    let n = tokens.len();
    let max_words = ontology.max_trigger_words().max(1);
    let mut cands = Vec::new();
    for start in 0..n {
        for words in 1..=max_words.min(n - start) {
            let range = start..start + words;
            let toks = &tokens.tokens[range.clone()];
            if toks.iter().any(|t| t.is_punct()) {
                break;
            }
            let lemma_key = toks
                .iter()
                .map(|t| t.lemma.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let mut frames = ontology.lookup_triggers(&lemma_key);
            let mut key = lemma_key;
            if frames.is_empty() {
                let surface_key = toks
                    .iter()
                    .map(|t| t.surface.to_lowercase())
                    .collect::<Vec<_>>()
                    .join(" ");
                frames = ontology.lookup_triggers(&surface_key);
                key = surface_key;
            }
            if frames.is_empty() {
                continue;
            }
            let (category, verbal) = category_of(ontology, &frames);
            cands.push(Cand {
                trigger: Trigger {
                    lemma: key,
                    span: tokens.span_of(range.clone()),
                    tokens: range,
                    category,
                },
                words,
                verbal,
            });
        }
    }

    let is_pred = |c: &Cand| c.trigger.category == TriggerCategory::Predicate;
    let clausal = cands.iter().find(|c| {
        c.trigger.category == TriggerCategory::Clausal
            && cands
                .iter()
                .any(|l| is_pred(l) && l.trigger.tokens.end <= c.trigger.tokens.start)
            && cands
                .iter()
                .any(|r| is_pred(r) && r.trigger.tokens.start >= c.trigger.tokens.end)
    });
    if let Some(c) = clausal {
        return Some(c.trigger.clone());
    }
    cands
        .into_iter()
        .filter(|c| c.trigger.category != TriggerCategory::Clausal)
        .min_by(|a, b| {
            b.words
                .cmp(&a.words)
                .then(b.verbal.cmp(&a.verbal))
                .then(a.trigger.tokens.start.cmp(&b.trigger.tokens.start))
        })
        .map(|c| c.trigger)
}

/// Expected type of a role: mean embedding of its example fillers plus the
/// fraction of annotated occurrences found left of the trigger.
#[derive(Debug, Clone)]
struct RoleType {
    vector: Vector,
    left_rate: Option<f64>,
}

/// One scored (role, span) pairing considered by role assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleCandidate {
    pub role: String,
    pub span: CharSpan,
    /// Type similarity, compared against the floor.
    pub similarity: f64,
    /// Similarity plus positional agreement; the greedy sort key.
    pub score: f64,
}

pub struct Recognizer {
    ontology: Arc<Ontology>,
    store: Arc<EmbeddingStore>,
    analyzer: Analyzer,
    config: RecognizerConfig,
    frame_embeddings: HashMap<String, FrameEmbedding>,
    role_types: HashMap<(String, String), RoleType>,
    chunker: Box<dyn SyntacticAnalyzer>,
}

impl std::fmt::Debug for Recognizer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Recognizer")
            .field("frames", &self.ontology.len())
            .field("config", &self.config)
            .finish()
    }
}

impl Recognizer {
    pub fn new(
        ontology: Arc<Ontology>,
        store: Arc<EmbeddingStore>,
        config: RecognizerConfig,
    ) -> Self {
        Self::with_chunker(ontology, store, config, Box::new(BoundaryChunker))
    }

    pub fn with_chunker(
        ontology: Arc<Ontology>,
        store: Arc<EmbeddingStore>,
        config: RecognizerConfig,
        chunker: Box<dyn SyntacticAnalyzer>,
    ) -> Self {
        let analyzer = Analyzer::new(store.stopwords().clone());
        let frame_embeddings = ontology
            .frames()
            .iter()
            .map(|f| (f.id.clone(), store.frame_embedding(&analyzer, f)))
            .collect();
        let mut role_types = HashMap::new();
        for f in ontology.frames() {
            for role in ontology.resolve_roles(&f.id).expect("frame exists") {
                if role.is_focal() {
                    continue;
                }
                let mut fillers: Vec<String> = role.example_fillers.clone();
                let (mut left, mut total) = (0usize, 0usize);
                for ex in &f.examples {
                    if let Some(span) = ex.roles.get(&role.name) {
                        fillers.push(span.slice(&ex.text).to_string());
                        total += 1;
                        if span.end <= ex.trigger.start {
                            left += 1;
                        }
                    }
                }
                let mut acc = store.zero();
                for filler in &fillers {
                    let lemmas: Vec<String> = analyzer
                        .analyze(filler)
                        .tokens
                        .into_iter()
                        .map(|t| t.lemma)
                        .collect();
                    acc += &store.sentence_embedding(&lemmas);
                }
                let vector = if fillers.is_empty() {
                    acc
                } else {
                    acc.scale(1.0 / fillers.len() as f64)
                };
                let left_rate = (total > 0).then(|| left as f64 / total as f64);
                role_types.insert(
                    (f.id.clone(), role.name.clone()),
                    RoleType { vector, left_rate },
                );
            }
        }
        Recognizer {
            ontology,
            store,
            analyzer,
            config,
            frame_embeddings,
            role_types,
            chunker,
        }
    }

    pub fn ontology(&self) -> &Arc<Ontology> {
        &self.ontology
    }

    pub fn store(&self) -> &Arc<EmbeddingStore> {
        &self.store
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    pub fn config(&self) -> &RecognizerConfig {
        &self.config
    }

    pub fn frame_embedding(&self, frame_id: &str) -> Option<&FrameEmbedding> {
        self.frame_embeddings.get(frame_id)
    }

    pub fn analyze(&self, text: &str) -> TokenSeq {
        self.analyzer.analyze(text)
    }

    pub fn select_trigger(&self, tokens: &TokenSeq) -> Option<Trigger> {
        select_trigger(&self.ontology, tokens)
    }

    fn content_lemmas(tokens: &TokenSeq) -> Vec<&str> {
        tokens
            .tokens
            .iter()
            .filter(|t| !t.is_punct())
            .map(|t| t.lemma.as_str())
            .collect()
    }

    pub fn sentence_embedding(&self, tokens: &TokenSeq) -> Vector {
        self.store.sentence_embedding(&Self::content_lemmas(tokens))
    }

    /// Candidate frames for `trigger` ranked by cosine between the sentence
    /// embedding and each frame embedding; ties go to the smaller id.
    pub fn rank_frames(
        &self,
        tokens: &TokenSeq,
        trigger: &Trigger,
        k: usize,
    ) -> Result<Vec<(String, f64)>, RecognizerError> {
        let sentence = self.sentence_embedding(tokens);
        let mut scored: Vec<(String, f64)> = self
            .ontology
            .lookup_triggers(&trigger.lemma)
            .into_iter()
            .filter_map(|id| {
                let fe = self.frame_embeddings.get(&id)?;
                if fe.excluded() {
                    return None;
                }
                let s = cosine(&sentence, &fe.vector).expect("shared dimension");
                Some((id, s))
            })
            .collect();
        if scored.is_empty() {
            return Err(RecognizerError::NoCandidates(trigger.lemma.clone()));
        }
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        scored.truncate(k.max(1));
        Ok(scored)
    }

    pub fn detect_spans(&self, tokens: &TokenSeq, trigger: &Trigger) -> SpanAnalysis {
        self.chunker
            .analyze_arguments(tokens, trigger.tokens.clone(), trigger.category)
    }

    fn span_vector(&self, tokens: &TokenSeq, span: CharSpan) -> Vector {
        let lemmas: Vec<&str> = tokens
            .tokens
            .iter()
            .filter(|t| span.contains(&t.span) && !t.is_punct())
            .map(|t| t.lemma.as_str())
            .collect();
        self.store.sentence_embedding(&lemmas)
    }

    /// Every (role, span) pair with its type similarity and greedy score.
    pub fn role_candidates(
        &self,
        frame_id: &str,
        tokens: &TokenSeq,
        trigger_span: CharSpan,
        spans: &[CharSpan],
    ) -> Result<Vec<RoleCandidate>, RecognizerError> {
        let roles = self.ontology.resolve_roles(frame_id)?;
        let mut out = Vec::new();
        for role in roles.iter().filter(|r| !r.is_focal()) {
            let rt = &self.role_types[&(frame_id.to_string(), role.name.clone())];
            for &span in spans {
                let similarity =
                    cosine(&self.span_vector(tokens, span), &rt.vector).expect("shared dimension");
                let side = match rt.left_rate {
                    Some(rate) if span.end <= trigger_span.start => 2.0 * rate - 1.0,
                    Some(rate) => 1.0 - 2.0 * rate,
                    None => 0.0,
                };
                out.push(RoleCandidate {
                    role: role.name.clone(),
                    span,
                    similarity,
                    score: similarity + self.config.side_weight * side,
                });
            }
        }
        Ok(out)
    }

    /// Binds spans to the frame's non-focal roles.
    ///
    /// Coordinators and builtin comparisons bind positionally. Everything
    /// else is greedy: repeatedly take the best remaining (role, span) pair
    /// whose similarity clears the floor; ties go to the smaller role name,
    /// then the earlier span.
    pub fn assign_roles(
        &self,
        frame_id: &str,
        tokens: &TokenSeq,
        trigger_span: CharSpan,
        spans: &[CharSpan],
    ) -> Result<BTreeMap<String, CharSpan>, RecognizerError> {
        let frame = self.ontology.frame(frame_id)?;
        let mut out = BTreeMap::new();
        if spans.is_empty() {
            return Ok(out);
        }
        if frame.pos == Some(PartOfSpeech::Conj) || frame.builtin.is_some() {
            let roles = self
                .ontology
                .resolve_roles(frame_id)?
                .iter()
                .filter(|r| !r.is_focal());
            let mut ordered = spans.to_vec();
            ordered.sort();
            for (role, span) in roles.zip(ordered) {
                out.insert(role.name.clone(), span);
            }
            return Ok(out);
        }
        let mut cands: Vec<RoleCandidate> = self
            .role_candidates(frame_id, tokens, trigger_span, spans)?
            .into_iter()
            .filter(|c| c.similarity > self.config.role_similarity_floor)
            .collect();
        cands.sort_by(|a, b| {
            b.score
                .total_cmp(&a.score)
                .then_with(|| a.role.cmp(&b.role))
                .then_with(|| a.span.cmp(&b.span))
        });
        let mut used_spans = Vec::new();
        for c in cands {
            if out.contains_key(&c.role) || used_spans.contains(&c.span) {
                continue;
            }
            used_spans.push(c.span);
            out.insert(c.role, c.span);
        }
        Ok(out)
    }

    /// Non-focal roles whose expected type resembles the whole sentence
    /// closely enough to be offered as a likely slot.
    pub fn context_roles(
        &self,
        frame_id: &str,
        tokens: &TokenSeq,
    ) -> Result<Vec<String>, RecognizerError> {
        let sentence = self.sentence_embedding(tokens);
        Ok(self
            .ontology
            .resolve_roles(frame_id)?
            .iter()
            .filter(|r| !r.is_focal())
            .filter(|r| {
                let rt = &self.role_types[&(frame_id.to_string(), r.name.clone())];
                cosine(&sentence, &rt.vector).expect("shared dimension")
                    > self.config.role_similarity_floor
            })
            .map(|r| r.name.clone())
            .collect())
    }

    /// The embedding pipeline alone: trigger, ranking, spans, roles.
    pub fn parse_knn(&self, text: &str) -> Vec<FrameInterpretation> {
        let tokens = self.analyze(text);
        let Some(trigger) = self.select_trigger(&tokens) else {
            return Vec::new();
        };
        let ranked = match self.rank_frames(&tokens, &trigger, self.config.k) {
            Ok(r) => r,
            Err(e) => {
                debug!("no ranking: {e}");
                return Vec::new();
            }
        };
        let spans = self.detect_spans(&tokens, &trigger);
        ranked
            .into_iter()
            .map(|(frame_id, score)| {
                let role_bindings = self
                    .assign_roles(&frame_id, &tokens, trigger.span, &spans.spans)
                    .expect("ranked frame exists");
                FrameInterpretation {
                    frame_id,
                    trigger_span: trigger.span,
                    role_bindings,
                    confidence: score.clamp(0.0, 1.0),
                    source: Source::Knn,
                    negated: spans.negated,
                }
            })
            .collect()
    }

    fn accept_external(
        &self,
        text: &str,
        tokens: &TokenSeq,
        w: WireInterpretation,
    ) -> Option<FrameInterpretation> {
        let len = text.chars().count();
        let roles = self.ontology.resolve_roles(&w.frame).ok()?;
        let in_text = |s: &CharSpan| s.start < s.end && s.end <= len;
        let valid = in_text(&w.trigger)
            && (0.0..=1.0).contains(&w.confidence)
            && w.roles.iter().all(|(name, span)| {
                in_text(span) && roles.iter().any(|r| &r.name == name && !r.is_focal())
            });
        if !valid {
            warn!(frame = %w.frame, "dropping malformed external interpretation");
            return None;
        }
        let trigger_tok = tokens
            .tokens
            .iter()
            .position(|t| t.span.start >= w.trigger.start);
        let negated = trigger_tok.is_some_and(|i| {
            let category = category_of(&self.ontology, &[w.frame.clone()].into_iter().collect()).0;
            let end = tokens.tokens[i..]
                .iter()
                .take_while(|t| t.span.end <= w.trigger.end)
                .count()
                .max(1);
            self.chunker
                .analyze_arguments(tokens, i..i + end, category)
                .negated
        });
        Some(FrameInterpretation {
            frame_id: w.frame,
            trigger_span: w.trigger,
            role_bindings: w.roles,
            confidence: w.confidence,
            source: Source::External,
            negated,
        })
    }

    /// Interprets `text`, preferring the external parser when it answers
    /// with enough confidence.
    pub fn parse(
        &self,
        text: &str,
        external: Option<&dyn ExternalParser>,
    ) -> Vec<FrameInterpretation> {
        if let Some(client) = external {
            let tokens = self.analyze(text);
            let trigger = self.select_trigger(&tokens).map(|t| t.span);
            match client.interpret(&ParseRequest {
                text: text.to_string(),
                trigger,
            }) {
                Ok(resp) => {
                    let interps: Vec<FrameInterpretation> = resp
                        .interpretations
                        .into_iter()
                        .filter_map(|w| self.accept_external(text, &tokens, w))
                        .collect();
                    let best = interps
                        .iter()
                        .map(|i| i.confidence)
                        .fold(f64::NEG_INFINITY, f64::max);
                    if !interps.is_empty() && best >= self.config.low_confidence_threshold {
                        return interps;
                    }
                    debug!(
                        best,
                        "external parse empty or low confidence; using kNN fallback"
                    );
                }
                Err(e) => warn!("external parser unavailable ({e}); using kNN fallback"),
            }
        }
        self.parse_knn(text)
    }
}

/// Orders interpretations by descending confidence, then frame id.
pub fn by_confidence(a: &FrameInterpretation, b: &FrameInterpretation) -> Ordering {
    b.confidence
        .total_cmp(&a.confidence)
        .then_with(|| a.frame_id.cmp(&b.frame_id))
}
