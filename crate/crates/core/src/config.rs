//! Runtime configuration: a TOML file, overridable from `SKATE_*`
//! environment variables. Unset resource paths fall back to the bundled
//! fixtures.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::embedding::load_vectors;
use crate::fixtures;
use crate::ontology::parse_ontology;
use crate::policy::PolicyDocument;
use crate::recognizer::{
    CorrectionLog, ExternalParser, HttpParserClient, Recognizer, RecognizerConfig,
};
use crate::suggest::HttpGenerator;

pub const ENV_PREFIX: &str = "SKATE_";
pub const DEFAULT_BIND: &str = "127.0.0.1:8080";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad config file {path}: {message}")]
    Syntax { path: PathBuf, message: String },
    #[error("bad value for {var}: {message}")]
    Env { var: String, message: String },
    #[error("cannot load {what} from {path}: {message}")]
    Resource {
        what: &'static str,
        path: PathBuf,
        message: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub ontology: Option<PathBuf>,
    pub vectors: Option<PathBuf>,
    pub stopwords: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub policy: Option<PathBuf>,
    /// Where confirmed interpretations are appended; none disables it.
    pub corrections: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct External {
    pub parser_url: Option<String>,
    pub generator_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Server {
    pub bind: String,
}

impl Default for Server {
    fn default() -> Self {
        Server {
            bind: DEFAULT_BIND.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub paths: Paths,
    pub recognizer: RecognizerConfig,
    pub external: External,
    pub server: Server,
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl Config {
    pub fn parse(src: &str, path: &Path) -> Result<Self, ConfigError> {
        toml::from_str(src).map_err(|e| ConfigError::Syntax {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    /// Reads `path` (defaults when absent), then applies the process
    /// environment.
    pub fn load(path: Option<&Path>) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => Self::parse(&read(p)?, p)?,
            None => Config::default(),
        };
        cfg.apply_env(|k| std::env::var(k).ok())?;
        Ok(cfg)
    }

    /// Overrides fields from `SKATE_ONTOLOGY`, `SKATE_VECTORS`,
    /// `SKATE_STOPWORDS`, `SKATE_CORPUS`, `SKATE_POLICY`,
    /// `SKATE_CORRECTIONS`, `SKATE_K`, `SKATE_TAU`, `SKATE_ROLE_FLOOR`,
    /// `SKATE_SIDE_WEIGHT`, `SKATE_PARSER_URL`, `SKATE_GENERATOR_URL` and
    /// `SKATE_BIND`.
    pub fn apply_env(
        &mut self,
        lookup: impl Fn(&str) -> Option<String>,
    ) -> Result<(), ConfigError> {
        let get = |name: &str| lookup(&format!("{ENV_PREFIX}{name}")).filter(|v| !v.is_empty());
        fn num<T: std::str::FromStr>(name: &str, v: String) -> Result<T, ConfigError>
        where
            T::Err: std::fmt::Display,
        {
            v.trim().parse().map_err(|e: T::Err| ConfigError::Env {
                var: format!("{ENV_PREFIX}{name}"),
                message: e.to_string(),
            })
        }
        let paths = [
            ("ONTOLOGY", &mut self.paths.ontology),
            ("VECTORS", &mut self.paths.vectors),
            ("STOPWORDS", &mut self.paths.stopwords),
            ("CORPUS", &mut self.paths.corpus),
            ("POLICY", &mut self.paths.policy),
            ("CORRECTIONS", &mut self.paths.corrections),
        ];
        for (name, slot) in paths {
            if let Some(v) = get(name) {
                *slot = Some(PathBuf::from(v));
            }
        }
        if let Some(v) = get("K") {
            self.recognizer.k = num("K", v)?;
        }
        if let Some(v) = get("TAU") {
            self.recognizer.low_confidence_threshold = num("TAU", v)?;
        }
        if let Some(v) = get("ROLE_FLOOR") {
            self.recognizer.role_similarity_floor = num("ROLE_FLOOR", v)?;
        }
        if let Some(v) = get("SIDE_WEIGHT") {
            self.recognizer.side_weight = num("SIDE_WEIGHT", v)?;
        }
        if let Some(v) = get("PARSER_URL") {
            self.external.parser_url = Some(v);
        }
        if let Some(v) = get("GENERATOR_URL") {
            self.external.generator_url = Some(v);
        }
        if let Some(v) = get("BIND") {
            self.server.bind = v;
        }
        Ok(())
    }

    pub fn recognizer(&self) -> Result<Recognizer, ConfigError> {
        let resource = |what, path: &Path, message: String| ConfigError::Resource {
            what,
            path: path.to_path_buf(),
            message,
        };
        let ontology = match &self.paths.ontology {
            Some(p) => {
                parse_ontology(&read(p)?).map_err(|e| resource("ontology", p, e.to_string()))?
            }
            None => fixtures::ontology(),
        };
        let stopwords = match &self.paths.stopwords {
            Some(p) => fixtures::parse_stopwords(&read(p)?),
            None => fixtures::default_stopwords(),
        };
        let store = match &self.paths.vectors {
            Some(p) => load_vectors(read(p)?.as_bytes(), stopwords)
                .map_err(|e| resource("vectors", p, e.to_string()))?,
            None => load_vectors(fixtures::VECTORS.as_bytes(), stopwords)
                .expect("bundled vectors are valid"),
        };
        Ok(Recognizer::new(
            Arc::new(ontology),
            Arc::new(store),
            self.recognizer,
        ))
    }

    pub fn corpus_lines(&self) -> Result<Vec<String>, ConfigError> {
        match &self.paths.corpus {
            Some(p) => Ok(read(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from)
                .collect()),
            None => Ok(fixtures::corpus_lines()),
        }
    }

    pub fn policy(&self) -> Result<PolicyDocument, ConfigError> {
        match &self.paths.policy {
            Some(p) => PolicyDocument::parse(&read(p)?).map_err(|e| ConfigError::Resource {
                what: "policy",
                path: p.clone(),
                message: e.to_string(),
            }),
            None => Ok(fixtures::policy_document()),
        }
    }

    pub fn external_parser(&self) -> Option<Arc<dyn ExternalParser>> {
        self.external
            .parser_url
            .as_ref()
            .map(|u| Arc::new(HttpParserClient::new(u.clone())) as Arc<dyn ExternalParser>)
    }

    pub fn generator(&self) -> Option<HttpGenerator> {
        self.external
            .generator_url
            .as_ref()
            .map(|u| HttpGenerator::new(u.clone()))
    }

    pub fn corrections(&self) -> Option<Arc<CorrectionLog>> {
        self.paths
            .corrections
            .as_ref()
            .map(|p| Arc::new(CorrectionLog::new(p.clone())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn defaults_use_fixtures() {
        let cfg = Config::default();
        assert_eq!(cfg.recognizer, RecognizerConfig::default());
        assert_eq!(cfg.server.bind, DEFAULT_BIND);
        assert!(cfg.recognizer().unwrap().ontology().contains("taking"));
        assert!(!cfg.corpus_lines().unwrap().is_empty());
        assert!(cfg.external_parser().is_none());
    }

    #[test]
    fn file_then_env() {
        let src =
            "[recognizer]\nk = 5\n\n[external]\nparser_url = \"http://localhost:9000/parse\"\n";
        let mut cfg = Config::parse(src, Path::new("skate.toml")).unwrap();
        assert_eq!(cfg.recognizer.k, 5);
        assert_eq!(
            cfg.recognizer.low_confidence_threshold,
            RecognizerConfig::default().low_confidence_threshold
        );
        let env: HashMap<&str, &str> = [
            ("SKATE_K", "2"),
            ("SKATE_TAU", "0.5"),
            ("SKATE_BIND", "0.0.0.0:1"),
        ]
        .into();
        cfg.apply_env(|k| env.get(k).map(|v| v.to_string()))
            .unwrap();
        assert_eq!(cfg.recognizer.k, 2);
        assert_eq!(cfg.recognizer.low_confidence_threshold, 0.5);
        assert_eq!(cfg.server.bind, "0.0.0.0:1");
        assert_eq!(
            cfg.external.parser_url.as_deref(),
            Some("http://localhost:9000/parse")
        );
    }

    #[test]
    fn bad_values_are_reported() {
        assert!(matches!(
            Config::parse("[recognizer]\nkay = 1\n", Path::new("x")),
            Err(ConfigError::Syntax { .. })
        ));
        let mut cfg = Config::default();
        let err = cfg
            .apply_env(|k| (k == "SKATE_K").then(|| "many".to_string()))
            .unwrap_err();
        assert!(matches!(err, ConfigError::Env { ref var, .. } if var == "SKATE_K"));
    }
}
