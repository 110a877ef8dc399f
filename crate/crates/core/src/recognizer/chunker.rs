//! Boundary-token chunking for argument-span detection.
//!
//! A sentence is split left and right of the trigger at prepositions,
//! subordinators, punctuation and coordinators; every remaining run that
//! holds at least one content word becomes a candidate argument span.

use std::ops::Range;

use crate::text::{CharSpan, TokenSeq};

/// How the trigger relates to its arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriggerCategory {
    /// Verbal or predicative trigger: auxiliaries and negation directly
    /// before it form its verb group and are not arguments.
    Predicate,
    /// Noun-phrase head.
    Nominal,
    /// Clause coordinator: each side is one clausal argument.
    Clausal,
}

/// Result of syntactic analysis around a trigger.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpanAnalysis {
    pub spans: Vec<CharSpan>,
    /// A negator (`not`, `n't`, `never`) occurs in the verb group.
    pub negated: bool,
}

/// Front-end that finds argument spans for a located trigger. A
/// dependency-parser backed implementation can be swapped in here.
pub trait SyntacticAnalyzer: Send + Sync {
    fn analyze_arguments(
        &self,
        tokens: &TokenSeq,
        trigger: Range<usize>,
        category: TriggerCategory,
    ) -> SpanAnalysis;
}

pub(crate) const PREPOSITIONS: &[&str] = &[
    "in", "on", "at", "to", "from", "by", "for", "with", "without", "about", "into", "onto",
    "over", "under", "between", "through", "during", "against", "among", "within", "upon", "off",
    "across", "behind", "near", "toward", "towards", "around", "inside", "outside", "after",
    "before", "since", "until",
];

const SUBORDINATORS: &[&str] = &[
    "if",
    "when",
    "whenever",
    "while",
    "because",
    "although",
    "though",
    "unless",
    "than",
    "so",
    "then",
    "often",
    "usually",
    "generally",
    "sometimes",
    "always",
    "typically",
    "also",
];

const COORDINATORS: &[&str] = &["and", "or", "but", "nor"];

const DETERMINERS: &[&str] = &[
    "a", "an", "the", "this", "that", "these", "those", "some", "any", "each", "every", "my",
    "your", "his", "her", "its", "our", "their", "no",
];

const VERB_GROUP: &[&str] = &[
    "be", "do", "have", "will", "would", "shall", "should", "can", "could", "may", "might", "must",
    "not", "never", "to",
];

const NEGATORS: &[&str] = &["not", "never"];

fn is_in(set: &[&str], w: &str) -> bool {
    set.contains(&w)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryChunker;

impl BoundaryChunker {
    fn verb_group_start(tokens: &TokenSeq, trigger_start: usize) -> usize {
        let mut i = trigger_start;
        while i > 0 && is_in(VERB_GROUP, &tokens.tokens[i - 1].lemma) {
            i -= 1;
        }
        i
    }

    fn runs(tokens: &TokenSeq, range: Range<usize>) -> Vec<Range<usize>> {
        let toks = &tokens.tokens;
        let mut runs = Vec::new();
        let mut cur: Option<usize> = None;
        let close = |cur: &mut Option<usize>, end: usize, runs: &mut Vec<Range<usize>>| {
            if let Some(s) = cur.take() {
                if s < end {
                    runs.push(s..end);
                }
            }
        };
        for i in range.clone() {
            let t = &toks[i];
            let lemma = t.lemma.as_str();
            if t.is_punct() || is_in(SUBORDINATORS, lemma) {
                close(&mut cur, i, &mut runs);
            } else if is_in(COORDINATORS, lemma) {
                let prev_content = cur.is_some() && i > 0 && !toks[i - 1].is_function_word;
                let next_content =
                    i + 1 < range.end && !toks[i + 1].is_function_word && !toks[i + 1].is_punct();
                if !(prev_content && next_content) {
                    close(&mut cur, i, &mut runs);
                }
            } else if is_in(PREPOSITIONS, lemma) {
                close(&mut cur, i, &mut runs);
                cur = Some(i);
            } else if is_in(DETERMINERS, lemma) {
                if cur.is_some() && i > 0 && !toks[i - 1].is_function_word {
                    close(&mut cur, i, &mut runs);
                }
                cur.get_or_insert(i);
            } else {
                cur.get_or_insert(i);
            }
        }
        close(&mut cur, range.end, &mut runs);
        runs.retain(|r| {
            toks[r.clone()]
                .iter()
                .any(|t| !t.is_function_word && !t.is_punct())
        });
        runs
    }

    fn clause(tokens: &TokenSeq, range: Range<usize>) -> Option<Range<usize>> {
        let toks = &tokens.tokens;
        let edge = |i: usize| {
            toks[i].is_punct()
                || is_in(SUBORDINATORS, &toks[i].lemma)
                || is_in(COORDINATORS, &toks[i].lemma)
        };
        let (mut s, mut e) = (range.start, range.end);
        while s < e && edge(s) {
            s += 1;
        }
        while e > s && edge(e - 1) {
            e -= 1;
        }
        (s < e).then_some(s..e)
    }
}

impl SyntacticAnalyzer for BoundaryChunker {
    fn analyze_arguments(
        &self,
        tokens: &TokenSeq,
        trigger: Range<usize>,
        category: TriggerCategory,
    ) -> SpanAnalysis {
        let n = tokens.len();
        match category {
            TriggerCategory::Clausal => {
                let spans = [
                    Self::clause(tokens, 0..trigger.start),
                    Self::clause(tokens, trigger.end..n),
                ]
                .into_iter()
                .flatten()
                .map(|r| tokens.span_of(r))
                .collect();
                SpanAnalysis {
                    spans,
                    negated: false,
                }
            }
            TriggerCategory::Predicate | TriggerCategory::Nominal => {
                let left_end = if category == TriggerCategory::Predicate {
                    Self::verb_group_start(tokens, trigger.start)
                } else {
                    trigger.start
                };
                let negated = tokens.tokens[left_end..trigger.start]
                    .iter()
                    .any(|t| is_in(NEGATORS, &t.lemma));
                let mut spans: Vec<CharSpan> = Self::runs(tokens, 0..left_end)
                    .into_iter()
                    .chain(Self::runs(tokens, trigger.end..n))
                    .map(|r| tokens.span_of(r))
                    .collect();
                spans.sort();
                SpanAnalysis { spans, negated }
            }
        }
    }
}
