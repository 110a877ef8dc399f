//! Bundled desk-scale fixtures: a small frame ontology, topic-mixture word
//! vectors covering its vocabulary, a story-domain completion corpus, an
//! annotated evaluation corpus and the school-access policy.

use std::collections::HashSet;
use std::sync::Arc;

use crate::embedding::{load_vectors, EmbeddingStore};
use crate::ontology::{parse_ontology, Ontology};
use crate::policy::PolicyDocument;
use crate::recognizer::{Recognizer, RecognizerConfig};

pub const STOPWORDS: &str = include_str!("../fixtures/stopwords.txt");
pub const ONTOLOGY: &str = include_str!("../fixtures/ontology.json");
pub const VECTORS: &str = include_str!("../fixtures/vectors.txt");
pub const CORPUS: &str = include_str!("../fixtures/corpus.txt");
pub const EVAL_CORPUS: &str = include_str!("../fixtures/eval.ndjson");
pub const POLICY: &str = include_str!("../fixtures/policy.json");

/// Parses a stopword file: one word per line, `#` comments.
pub fn parse_stopwords(src: &str) -> HashSet<String> {
    src.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_lowercase)
        .collect()
}

pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(STOPWORDS)
}

pub fn ontology() -> Ontology {
    parse_ontology(ONTOLOGY).expect("bundled ontology is valid")
}

pub fn store() -> EmbeddingStore {
    load_vectors(VECTORS.as_bytes(), default_stopwords()).expect("bundled vectors are valid")
}

pub fn recognizer() -> Recognizer {
    Recognizer::new(
        Arc::new(ontology()),
        Arc::new(store()),
        RecognizerConfig::default(),
    )
}

pub fn corpus_lines() -> Vec<String> {
    CORPUS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect()
}

pub fn policy_document() -> PolicyDocument {
    PolicyDocument::parse(POLICY).expect("bundled policy parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recognizer::ExampleRecord;
    use crate::text::Analyzer;
    use std::collections::BTreeSet;

    #[test]
    fn vocabulary_covers_fixture_content_words() {
        let store = store();
        let analyzer = Analyzer::default();
        let onto = ontology();
        let mut texts: Vec<String> = Vec::new();
        for f in onto.frames() {
            texts.extend(f.trigger_lemmas.iter().cloned());
            texts.extend(f.examples.iter().map(|e| e.text.clone()));
            for r in &f.roles {
                texts.extend(r.example_fillers.iter().cloned());
            }
        }
        for line in EVAL_CORPUS.lines() {
            let rec: ExampleRecord = serde_json::from_str(line).unwrap();
            texts.push(rec.text);
        }
        texts.extend(corpus_lines());
        let missing: BTreeSet<String> = texts
            .iter()
            .flat_map(|t| analyzer.analyze(t).tokens)
            .filter(|t| !t.is_punct() && !t.is_function_word && !store.contains(&t.lemma))
            .map(|t| t.lemma)
            .collect();
        assert!(missing.is_empty(), "missing vectors: {missing:?}");
    }
}
