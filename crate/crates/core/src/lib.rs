//! Core library for guided natural-language rule authoring: frame
//! ontology, embedding-based concept recognition, the interactive slot
//! session, rule conversion and the compliance policy engine.

pub mod config;
pub mod converter;
pub mod embedding;
pub mod eval;
pub mod fixtures;
pub mod http;
pub mod ontology;
pub mod policy;
pub mod recognizer;
pub mod session;
pub mod suggest;
pub mod text;
