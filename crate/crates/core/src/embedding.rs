//! Word-vector store and the sentence / frame embedding arithmetic used by
//! the kNN recognizer.
//!
//! Sentences embed as the plain sum of their in-vocabulary tokens. Frames
//! embed as the mean over their trigger tokens and the content words of
//! their annotated examples.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, BufReader, Read};
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ontology::FrameDef;
use crate::text::Analyzer;

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: component `{token}` is not a number")]
    Parse { line: usize, token: String },
    #[error("vector file contains no vectors")]
    EmptyVocabulary,
    #[error("vector dimensions differ: {0} vs {1}")]
    VectorDimensions(usize, usize),
    #[error("i/o error reading vectors: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vector(pub Vec<f64>);

impl Vector {
    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    pub fn scale(&self, k: f64) -> Vector {
        Vector(self.0.iter().map(|v| v * k).collect())
    }
}

impl AddAssign<&Vector> for Vector {
    fn add_assign(&mut self, rhs: &Vector) {
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            *a += b;
        }
    }
}

impl Add<&Vector> for Vector {
    type Output = Vector;
    fn add(mut self, rhs: &Vector) -> Vector {
        self += rhs;
        self
    }
}

/// `dot(a,b) / (|a||b|)`, or 0 when either vector has zero norm.
pub fn cosine(a: &Vector, b: &Vector) -> Result<f64, EmbeddingError> {
    if a.dim() != b.dim() {
        return Err(EmbeddingError::VectorDimensions(a.dim(), b.dim()));
    }
    let (na, nb) = (a.norm(), b.norm());
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((a.dot(b) / (na * nb)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameEmbedding {
    pub frame_id: String,
    pub vector: Vector,
    pub support_count: usize,
}

impl FrameEmbedding {
    /// Frames without any in-vocabulary token take no part in ranking.
    pub fn excluded(&self) -> bool {
        self.support_count == 0
    }
}

#[derive(Debug, Clone)]
pub struct EmbeddingStore {
    dimension: usize,
    vocab: HashMap<String, Vector>,
    stopwords: HashSet<String>,
}

impl EmbeddingStore {
    /// Builds a store from in-memory vectors. All vectors must share one
    /// positive dimension.
    pub fn from_vectors<I>(vectors: I, stopwords: HashSet<String>) -> Result<Self, EmbeddingError>
    where
        I: IntoIterator<Item = (String, Vector)>,
    {
        let mut vocab = HashMap::new();
        let mut dimension = 0;
        for (tok, v) in vectors {
            if dimension == 0 {
                dimension = v.dim();
            } else if v.dim() != dimension {
                return Err(EmbeddingError::VectorDimensions(dimension, v.dim()));
            }
            vocab.insert(tok.to_lowercase(), v);
        }
        if vocab.is_empty() || dimension == 0 {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        Ok(EmbeddingStore {
            dimension,
            vocab,
            stopwords,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn stopwords(&self) -> &HashSet<String> {
        &self.stopwords
    }

    pub fn set_stopwords(&mut self, stopwords: HashSet<String>) {
        self.stopwords = stopwords;
    }

    pub fn get(&self, token: &str) -> Option<&Vector> {
        self.vocab
            .get(token)
            .or_else(|| self.vocab.get(&token.to_lowercase()))
    }

    pub fn contains(&self, token: &str) -> bool {
        self.get(token).is_some()
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dimension)
    }

    /// Element-wise sum over in-vocabulary tokens; the zero vector when
    /// none are known.
    pub fn sentence_embedding<S: AsRef<str>>(&self, tokens: &[S]) -> Vector {
        let mut acc = self.zero();
        for t in tokens {
            if let Some(v) = self.get(t.as_ref()) {
                acc += v;
            }
        }
        acc
    }

    /// The distinct tokens that contribute to a frame's embedding: every
    /// word of every trigger lemma, plus the non-stopword lemmas of its
    /// example sentences, restricted to the vocabulary.
    pub fn frame_support(&self, analyzer: &Analyzer, frame: &FrameDef) -> BTreeSet<String> {
        let mut tokens = BTreeSet::new();
        for t in &frame.trigger_lemmas {
            tokens.extend(t.split_whitespace().map(str::to_lowercase));
        }
        for ex in &frame.examples {
            for tok in analyzer.analyze(&ex.text).tokens {
                if !tok.is_punct() && !self.stopwords.contains(&tok.lemma) {
                    tokens.insert(tok.lemma);
                }
            }
        }
        tokens.retain(|t| self.contains(t));
        tokens
    }

    pub fn frame_embedding(&self, analyzer: &Analyzer, frame: &FrameDef) -> FrameEmbedding {
        let support = self.frame_support(analyzer, frame);
        let mut acc = self.zero();
        for t in &support {
            acc += self.get(t).expect("support is in vocabulary");
        }
        let n = support.len();
        let vector = if n == 0 {
            acc
        } else {
            acc.scale(1.0 / n as f64)
        };
        FrameEmbedding {
            frame_id: frame.id.clone(),
            vector,
            support_count: n,
        }
    }
}

/// Parses the whitespace-delimited word-vector text format:
/// `token v1 v2 ... vD` per line. Duplicate tokens keep the last vector.
pub fn load_vectors<R: Read>(
    source: R,
    stopwords: HashSet<String>,
) -> Result<EmbeddingStore, EmbeddingError> {
    let reader = BufReader::new(source);
    let mut entries = Vec::new();
    let mut dim = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| EmbeddingError::Io(e.to_string()))?;
        let lineno = i + 1;
        let mut parts = line.split_whitespace();
        let Some(token) = parts.next() else { continue };
        let values = parts
            .map(|p| {
                p.parse::<f64>().map_err(|_| EmbeddingError::Parse {
                    line: lineno,
                    token: p.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if dim == 0 {
            if values.is_empty() {
                return Err(EmbeddingError::DimensionMismatch {
                    line: lineno,
                    expected: 1,
                    found: 0,
                });
            }
            dim = values.len();
        } else if values.len() != dim {
            return Err(EmbeddingError::DimensionMismatch {
                line: lineno,
                expected: dim,
                found: values.len(),
            });
        }
        entries.push((token.to_string(), Vector(values)));
    }
    EmbeddingStore::from_vectors(entries, stopwords)
}
