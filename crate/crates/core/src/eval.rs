//! Frame accuracy and span F1 of the recognizer over an annotated corpus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::recognizer::{ExampleRecord, ExternalParser, Recognizer};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("evaluation corpus is empty")]
    EmptyCorpus,
    #[error("corpus line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Outcome of one corpus sentence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceResult {
    pub text: String,
    pub expected: String,
    pub predicted: Option<String>,
    pub matched_spans: usize,
    pub predicted_spans: usize,
    pub gold_spans: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub sentences: usize,
    pub frame_top1_accuracy: f64,
    pub span_precision: f64,
    pub span_recall: f64,
    pub span_f1: f64,
    /// expected frame -> predicted frame (or `"<none>"`) -> count
    pub confusion: BTreeMap<String, BTreeMap<String, usize>>,
    pub results: Vec<SentenceResult>,
}

/// `num / den` with 0/0 defined as 0.
fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn parse_corpus(src: &str) -> Result<Vec<ExampleRecord>, EvalError> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| EvalError::Parse {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

/// Runs `parse` on every sentence. A role span counts as correct only when
/// the top frame is right and both the label and the exact character
/// offsets agree with the annotation.
pub fn evaluate(
    recognizer: &Recognizer,
    corpus: &[ExampleRecord],
    external: Option<&dyn ExternalParser>,
) -> Result<EvalReport, EvalError> {
    if corpus.is_empty() {
        return Err(EvalError::EmptyCorpus);
    }
    let mut results = Vec::with_capacity(corpus.len());
    let mut confusion: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for rec in corpus {
        let top = recognizer.parse(&rec.text, external).into_iter().next();
        let predicted = top.as_ref().map(|i| i.frame_id.clone());
        let predicted_spans = top.as_ref().map_or(0, |i| i.role_bindings.len());
        let matched_spans = match &top {
            Some(i) if i.frame_id == rec.frame => rec
                .roles
                .iter()
                .filter(|(role, span)| i.role_bindings.get(*role) == Some(*span))
                .count(),
            _ => 0,
        };
        *confusion
            .entry(rec.frame.clone())
            .or_default()
            .entry(predicted.clone().unwrap_or_else(|| "<none>".into()))
            .or_default() += 1;
        results.push(SentenceResult {
            text: rec.text.clone(),
            expected: rec.frame.clone(),
            predicted,
            matched_spans,
            predicted_spans,
            gold_spans: rec.roles.len(),
        });
    }
    let correct = results
        .iter()
        .filter(|r| r.predicted.as_deref() == Some(r.expected.as_str()))
        .count();
    let matched: usize = results.iter().map(|r| r.matched_spans).sum();
    let precision = ratio(matched, results.iter().map(|r| r.predicted_spans).sum());
    let recall = ratio(matched, results.iter().map(|r| r.gold_spans).sum());
    Ok(EvalReport {
        sentences: results.len(),
        frame_top1_accuracy: ratio(correct, results.len()),
        span_precision: precision,
        span_recall: recall,
        span_f1: f1(precision, recall),
        confusion,
        results,
    })
}
