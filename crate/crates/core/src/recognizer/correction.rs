//! Confirmed interpretations logged as future training data.
//!
//! Records are newline-delimited JSON in the annotated-example layout
//! (`frame`, `text`, `trigger`, `roles`) so a log can be re-ingested as
//! frame examples.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::FrameInterpretation;
use crate::ontology::{AnnotatedExample, Ontology, OntologyError};
use crate::text::CharSpan;

#[derive(Debug, Error)]
pub enum StorageError {
    #[error("storage i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("chosen frame `{0}` also listed as rejected")]
    ChosenRejected(String),
}

/// One annotated sentence: the unit of both the correction log and the
/// evaluation corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleRecord {
    pub frame: String,
    pub text: String,
    pub trigger: CharSpan,
    #[serde(default)]
    pub roles: IndexMap<String, CharSpan>,
}

impl ExampleRecord {
    pub fn to_example(&self) -> AnnotatedExample {
        AnnotatedExample {
            text: self.text.clone(),
            trigger: self.trigger,
            roles: self.roles.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    #[serde(flatten)]
    pub example: ExampleRecord,
    pub rejected: Vec<String>,
    pub timestamp: String,
}

impl CorrectionRecord {
    pub fn new(
        text: &str,
        chosen: &FrameInterpretation,
        rejected: Vec<String>,
        timestamp: String,
    ) -> Result<Self, StorageError> {
        if rejected.contains(&chosen.frame_id) {
            return Err(StorageError::ChosenRejected(chosen.frame_id.clone()));
        }
        Ok(CorrectionRecord {
            example: ExampleRecord {
                frame: chosen.frame_id.clone(),
                text: text.to_string(),
                trigger: chosen.trigger_span,
                roles: chosen
                    .role_bindings
                    .iter()
                    .map(|(k, v)| (k.clone(), *v))
                    .collect(),
            },
            rejected,
            timestamp,
        })
    }
}

/// Append-only NDJSON log with a single serialized writer.
#[derive(Debug)]
pub struct CorrectionLog {
    path: PathBuf,
    writer: Mutex<()>,
}

impl CorrectionLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        CorrectionLog {
            path: path.into(),
            writer: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &CorrectionRecord) -> Result<(), StorageError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let io = |source| StorageError::Io {
            path: self.path.clone(),
            source,
        };
        let mut f = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(io)?;
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');
        f.write_all(line.as_bytes()).map_err(io)?;
        f.flush().map_err(io)
    }

    pub fn read_all(&self) -> Result<Vec<CorrectionRecord>, StorageError> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        read_ndjson(&self.path)
    }
}

/// Reads newline-delimited JSON records, skipping blank lines.
pub fn read_ndjson<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, StorageError> {
    let f = File::open(path).map_err(|source| StorageError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_ndjson(BufReader::new(f), path)
}

pub fn parse_ndjson<T: for<'de> Deserialize<'de>, R: BufRead>(
    reader: R,
    path: &Path,
) -> Result<Vec<T>, StorageError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|source| StorageError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|e| StorageError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })?,
        );
    }
    Ok(out)
}

/// Adds every logged correction to its frame's examples.
pub fn ingest(
    ontology: &Ontology,
    records: &[CorrectionRecord],
) -> Result<Ontology, OntologyError> {
    ontology.with_examples(
        records
            .iter()
            .map(|r| (r.example.frame.as_str(), r.example.to_example())),
    )
}
