//! HTTP/JSON API over the skate engine: authoring sessions, parsing,
//! completion suggestions, rule export and policy queries.
//!
//! Session mutations accept an optional `seq`, the last sequence number the
//! client saw, in the JSON body or the query string. A stale `seq` gets a
//! 409 carrying `expected_seq`. Recognizer work runs on the blocking pool;
//! each session is guarded by its own lock so calls on one session are
//! applied one at a time.

mod api;
pub mod error;

use std::collections::HashMap;
use std::sync::Arc;

use axum::routing::{get, post};
use axum::Router;
use parking_lot::{Mutex, RwLock};
use skate_core::config::{Config, ConfigError};
use skate_core::converter::HornRule;
use skate_core::policy::{build_policy, PolicyDocument, PolicyError, PolicyGraph, World};
use skate_core::recognizer::{ExternalParser, Recognizer};
use skate_core::session::{Clock, Engine, IdSource, RandomIds, Session, SystemClock};
use skate_core::suggest::HttpGenerator;

pub use error::{ApiError, ErrorBody};

/// Everything the handlers share.
pub struct AppState {
    engine: Engine,
    external: Option<Arc<dyn ExternalParser>>,
    ids: Arc<dyn IdSource>,
    clock: Arc<dyn Clock>,
    corpus: Vec<String>,
    generator: Option<HttpGenerator>,
    base_policy: PolicyDocument,
    sessions: RwLock<HashMap<String, Arc<Mutex<Entry>>>>,
    policy: RwLock<PolicyState>,
}

struct Entry {
    session: Session,
    created: String,
    rules: Option<Vec<HornRule>>,
}

struct PolicyState {
    graph: PolicyGraph,
    world: World,
}

impl AppState {
    pub fn new(recognizer: Arc<Recognizer>, policy: PolicyDocument) -> Result<Self, PolicyError> {
        let graph = build_policy(policy.clone())?;
        let clock: Arc<dyn Clock> = Arc::new(SystemClock);
        Ok(AppState {
            engine: Engine::new(recognizer).with_clock(clock.clone()),
            external: None,
            ids: Arc::new(RandomIds),
            clock,
            corpus: Vec::new(),
            generator: None,
            base_policy: policy,
            sessions: RwLock::new(HashMap::new()),
            policy: RwLock::new(PolicyState {
                graph,
                world: World::new(),
            }),
        })
    }

    /// Builds the state from a loaded configuration.
    pub fn from_config(cfg: &Config) -> Result<Self, ConfigError> {
        let policy = cfg.policy()?;
        let resource = |e: PolicyError| ConfigError::Resource {
            what: "policy",
            path: cfg.paths.policy.clone().unwrap_or_default(),
            message: e.to_string(),
        };
        let mut state = AppState::new(Arc::new(cfg.recognizer()?), policy).map_err(resource)?;
        state.engine = state.engine.with_corrections(cfg.corrections());
        Ok(state
            .with_external(cfg.external_parser())
            .with_corpus(cfg.corpus_lines()?)
            .with_generator(cfg.generator()))
    }

    pub fn with_external(mut self, external: Option<Arc<dyn ExternalParser>>) -> Self {
        self.engine = self.engine.with_external(external.clone());
        self.external = external;
        self
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.engine = self.engine.with_clock(clock.clone());
        self.clock = clock;
        self
    }

    pub fn with_ids(mut self, ids: Arc<dyn IdSource>) -> Self {
        self.ids = ids;
        self
    }

    /// Lines for the retrieval generator, also the fallback when an
    /// external generator is down.
    pub fn with_corpus(mut self, lines: Vec<String>) -> Self {
        self.corpus = lines;
        self
    }

    pub fn with_generator(mut self, generator: Option<HttpGenerator>) -> Self {
        self.generator = generator;
        self
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/healthz", get(api::healthz))
        .route("/parse", post(api::parse))
        .route("/sessions", post(api::create_session))
        .route("/sessions/{id}", get(api::get_session))
        .route("/sessions/{id}/events", get(api::session_events))
        .route(
            "/sessions/{id}/slots/{path}",
            axum::routing::delete(api::delete_slot),
        )
        .route("/sessions/{id}/slots/{path}/text", post(api::input_text))
        .route("/sessions/{id}/slots/{path}/sense", post(api::choose_sense))
        .route("/sessions/{id}/slots/{path}/refine", post(api::refine))
        .route("/sessions/{id}/slots/{path}/leave", post(api::leave))
        .route(
            "/sessions/{id}/slots/{path}/optional",
            post(api::add_optional),
        )
        .route("/sessions/{id}/suggestions", get(api::suggestions))
        .route("/sessions/{id}/submit", post(api::submit))
        .route("/sessions/{id}/rules", get(api::rules))
        .route("/policy", get(api::policy_view))
        .route("/policy/build", post(api::policy_build))
        .route("/policy/facts", post(api::policy_facts))
        .route("/policy/query", get(api::policy_query))
        .with_state(state)
}

/// Serves until Ctrl-C.
pub async fn serve(state: Arc<AppState>, bind: &str) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(bind).await?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
