//! Reference implementations used as test oracles, written independently
//! of the production code paths, plus scripted sessions and random
//! scenario generators.

pub mod embedding;
pub mod policy;
pub mod recognizer;
pub mod scripts;
