//! Brute-force frame ranking and role assignment.

use std::collections::{BTreeMap, BTreeSet};

use skate_core::ontology::normalize_trigger;
use skate_core::recognizer::{Recognizer, RoleCandidate};
use skate_core::text::{CharSpan, TokenSeq};

use crate::embedding;

/// Frame embedding recomputed from scratch: trigger words and example
/// content lemmas that have vectors, averaged.
pub fn frame_vector(rec: &Recognizer, frame_id: &str) -> Option<Vec<f64>> {
    let frame = rec.ontology().get(frame_id)?;
    let store = rec.store();
    let mut words = BTreeSet::new();
    for t in &frame.trigger_lemmas {
        for w in normalize_trigger(t).split(' ') {
            words.insert(w.to_string());
        }
    }
    for ex in &frame.examples {
        for tok in rec.analyzer().analyze(&ex.text).tokens {
            if tok.surface.chars().any(char::is_alphanumeric)
                && !store.stopwords().contains(&tok.lemma)
            {
                words.insert(tok.lemma);
            }
        }
    }
    let vecs: Vec<&[f64]> = words
        .iter()
        .filter_map(|w| store.get(w))
        .map(|v| v.as_slice())
        .collect();
    if vecs.is_empty() {
        return None;
    }
    Some(embedding::mean(&vecs, store.dimension()))
}

/// Every frame listing `lemma` as a trigger, scored against the sentence
/// and sorted by descending score then id.
pub fn rank_frames(rec: &Recognizer, tokens: &TokenSeq, lemma: &str) -> Vec<(String, f64)> {
    let store = rec.store();
    let lemmas: Vec<&[f64]> = tokens
        .tokens
        .iter()
        .filter_map(|t| store.get(&t.lemma))
        .map(|v| v.as_slice())
        .collect();
    let sentence = embedding::sum(&lemmas, store.dimension());
    let mut out: Vec<(String, f64)> = rec
        .ontology()
        .frames()
        .iter()
        .filter(|f| {
            f.trigger_lemmas
                .iter()
                .any(|t| normalize_trigger(t) == lemma)
        })
        .filter_map(|f| {
            Some((
                f.id.clone(),
                embedding::cosine(&sentence, &frame_vector(rec, &f.id)?),
            ))
        })
        .collect();
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    out
}

/// Greedy by repeated scans for the best admissible pair.
pub fn greedy_roles(cands: &[RoleCandidate], floor: f64) -> BTreeMap<String, CharSpan> {
    let mut out: BTreeMap<String, CharSpan> = BTreeMap::new();
    loop {
        let mut best: Option<&RoleCandidate> = None;
        for c in cands {
            if c.similarity <= floor
                || out.contains_key(&c.role)
                || out.values().any(|s| *s == c.span)
            {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    c.score > b.score
                        || (c.score == b.score
                            && (c.role.as_str(), c.span) < (b.role.as_str(), b.span))
                }
            };
            if better {
                best = Some(c);
            }
        }
        match best {
            Some(c) => {
                out.insert(c.role.clone(), c.span);
            }
            None => return out,
        }
    }
}

/// The injective partial assignment with the highest total score among
/// admissible pairs, by exhaustive search.
pub fn best_roles(cands: &[RoleCandidate], floor: f64) -> (BTreeMap<String, CharSpan>, f64) {
    let roles: Vec<String> = cands
        .iter()
        .map(|c| c.role.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    fn go(
        i: usize,
        roles: &[String],
        cands: &[RoleCandidate],
        floor: f64,
        cur: &mut BTreeMap<String, CharSpan>,
        total: f64,
        best: &mut (BTreeMap<String, CharSpan>, f64),
    ) {
        if i == roles.len() {
            if total > best.1 {
                *best = (cur.clone(), total);
            }
            return;
        }
        go(i + 1, roles, cands, floor, cur, total, best);
        for c in cands
            .iter()
            .filter(|c| c.role == roles[i] && c.similarity > floor && c.score > 0.0)
        {
            if cur.values().any(|s| *s == c.span) {
                continue;
            }
            cur.insert(c.role.clone(), c.span);
            go(i + 1, roles, cands, floor, cur, total + c.score, best);
            cur.remove(&c.role);
        }
    }
    let mut best = (BTreeMap::new(), 0.0);
    go(
        0,
        &roles,
        cands,
        floor,
        &mut BTreeMap::new(),
        0.0,
        &mut best,
    );
    best
}
