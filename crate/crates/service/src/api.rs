//! Request handlers.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use chrono::NaiveDate;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use skate_core::converter::{
    compose_rule, export, validate_rules, ExportFormat, HornRule, RuleSet,
};
use skate_core::policy::{
    assert_facts, build_policy, people, query, Edge, FactsDocument, Node, PolicyDocument, Report,
    StateDef, World,
};
use skate_core::recognizer::FrameInterpretation;
use skate_core::session::{
    open_required, SenseOption, Session, SessionEvent, Slot, Status, TemplateInstance, TemplateSpec,
};
use skate_core::suggest::{
    slot_context, suggest_for_slot, Committed, CompletionCandidate, RetrievalGenerator,
    SuggestError,
};

use crate::{ApiError, AppState, Entry, PolicyState};

type Shared = State<Arc<AppState>>;
type ApiResult<T> = Result<T, ApiError>;

const DEFAULT_SUGGESTIONS: usize = 5;

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

/// Parses a JSON body; an empty body reads as the default.
fn body<T: DeserializeOwned + Default>(bytes: &Bytes) -> ApiResult<T> {
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(T::default());
    }
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("bad JSON body: {e}")))
}

fn required_body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::bad_request(format!("bad JSON body: {e}")))
}

#[derive(Debug, Default, Deserialize)]
pub(crate) struct SeqQuery {
    seq: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
struct SeqBody {
    #[serde(default)]
    seq: Option<u64>,
}

#[derive(Debug, Serialize)]
pub(crate) struct SessionView {
    id: String,
    created: String,
    last_event_seq: u64,
    status: Status,
    focus: String,
    template: TemplateSpec,
    root: TemplateInstance,
    open_required: Vec<String>,
}

fn view(entry: &Entry) -> SessionView {
    let s = &entry.session;
    SessionView {
        id: s.id.clone(),
        created: entry.created.clone(),
        last_event_seq: s.seq,
        status: s.status,
        focus: s.focus.clone(),
        template: s.template.clone(),
        root: s.root.clone(),
        open_required: open_required(&s.root),
    }
}

fn entry(state: &AppState, id: &str) -> ApiResult<Arc<parking_lot::Mutex<Entry>>> {
    state
        .sessions
        .read()
        .get(id)
        .cloned()
        .ok_or_else(|| ApiError::not_found(format!("no session `{id}`")))
}

/// Runs `f` on the session under its lock after checking the client's
/// sequence number.
fn mutate<T>(
    state: &AppState,
    id: &str,
    seq: Option<u64>,
    f: impl FnOnce(&mut Entry) -> ApiResult<T>,
) -> ApiResult<T> {
    let cell = entry(state, id)?;
    let mut guard = cell.lock();
    if let Some(seen) = seq {
        if seen != guard.session.seq {
            return Err(ApiError::conflict(guard.session.seq, seen));
        }
    }
    f(&mut guard)
}

fn seq_of(query: &SeqQuery, body: Option<u64>) -> Option<u64> {
    body.or(query.seq)
}

pub(crate) async fn healthz(State(state): Shared) -> Json<serde_json::Value> {
    Json(serde_json::json!({
        "status": "ok",
        "frames": state.engine.ontology().frames().len(),
        "sessions": state.sessions.read().len(),
        "external_parser": state.external.is_some(),
        "generator": if state.generator.is_some() { "external" } else { "retrieval" },
    }))
}

#[derive(Debug, Deserialize)]
struct ParseBody {
    text: String,
    #[serde(default)]
    k: Option<usize>,
}

#[derive(Debug, Serialize)]
pub(crate) struct ParseResponse {
    text: String,
    interpretations: Vec<FrameInterpretation>,
}

pub(crate) async fn parse(State(state): Shared, bytes: Bytes) -> ApiResult<Json<ParseResponse>> {
    let req: ParseBody = required_body(&bytes)?;
    blocking(move || {
        let rec = state.engine.recognizer();
        let mut interpretations = rec.parse(&req.text, state.external.as_deref());
        interpretations.truncate(req.k.unwrap_or(rec.config().k).max(1));
        Ok(Json(ParseResponse {
            text: req.text,
            interpretations,
        }))
    })
    .await
}

#[derive(Debug, Deserialize)]
struct CreateBody {
    template: String,
}

pub(crate) async fn create_session(State(state): Shared, bytes: Bytes) -> ApiResult<Response> {
    let req: CreateBody = required_body(&bytes)?;
    let id = state.ids.next_id();
    let session = state.engine.start(id.clone(), &req.template)?;
    let entry = Entry {
        session,
        created: state.clock.now(),
        rules: None,
    };
    let body = view(&entry);
    state
        .sessions
        .write()
        .insert(id, Arc::new(parking_lot::Mutex::new(entry)));
    Ok((StatusCode::CREATED, Json(body)).into_response())
}

pub(crate) async fn get_session(
    State(state): Shared,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView>> {
    let cell = entry(&state, &id)?;
    let guard = cell.lock();
    Ok(Json(view(&guard)))
}

pub(crate) async fn session_events(
    State(state): Shared,
    Path(id): Path<String>,
) -> ApiResult<Json<Vec<SessionEvent>>> {
    let cell = entry(&state, &id)?;
    let guard = cell.lock();
    Ok(Json(guard.session.log.clone()))
}

#[derive(Debug, Serialize)]
pub(crate) struct OptionsResponse {
    seq: u64,
    path: String,
    text: String,
    options: Vec<SenseOption>,
}

fn options_response(s: &Session, path: &str, options: Vec<SenseOption>) -> OptionsResponse {
    let text = s
        .slot(path)
        .and_then(|slot| slot.state.text())
        .unwrap_or_default()
        .to_string();
    OptionsResponse {
        seq: s.seq,
        path: path.to_string(),
        text,
        options,
    }
}

#[derive(Debug, Default, Deserialize)]
struct TextBody {
    text: String,
    #[serde(default)]
    seq: Option<u64>,
}

pub(crate) async fn input_text(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<OptionsResponse>> {
    let req: TextBody = required_body(&bytes)?;
    blocking(move || {
        mutate(&state, &id, seq_of(&q, req.seq), |e| {
            let options = state.engine.input_text(&mut e.session, &path, &req.text)?;
            Ok(Json(options_response(&e.session, &path, options)))
        })
    })
    .await
}

pub(crate) async fn refine(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<OptionsResponse>> {
    let req: SeqBody = body(&bytes)?;
    blocking(move || {
        mutate(&state, &id, seq_of(&q, req.seq), |e| {
            let options = state.engine.refine(&mut e.session, &path)?;
            Ok(Json(options_response(&e.session, &path, options)))
        })
    })
    .await
}

#[derive(Debug, Deserialize)]
struct SenseBody {
    frame: String,
    #[serde(default)]
    seq: Option<u64>,
}

#[derive(Debug, Serialize)]
pub(crate) struct InstanceResponse {
    seq: u64,
    path: String,
    focus: String,
    instance: TemplateInstance,
    open_required: Vec<String>,
}

pub(crate) async fn choose_sense(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<InstanceResponse>> {
    let req: SenseBody = required_body(&bytes)?;
    blocking(move || {
        mutate(&state, &id, seq_of(&q, req.seq), |e| {
            let instance = state
                .engine
                .choose_sense(&mut e.session, &path, &req.frame)?;
            let s = &e.session;
            Ok(Json(InstanceResponse {
                seq: s.seq,
                path,
                focus: s.focus.clone(),
                instance,
                open_required: open_required(&s.root),
            }))
        })
    })
    .await
}

#[derive(Debug, Serialize)]
pub(crate) struct SlotResponse {
    seq: u64,
    path: String,
    focus: String,
    slot: Option<Slot>,
    open_required: Vec<String>,
}

fn slot_response(s: &Session, path: &str) -> SlotResponse {
    SlotResponse {
        seq: s.seq,
        path: path.to_string(),
        focus: s.focus.clone(),
        slot: s.slot(path).cloned(),
        open_required: open_required(&s.root),
    }
}

pub(crate) async fn leave(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<SlotResponse>> {
    let req: SeqBody = body(&bytes)?;
    mutate(&state, &id, seq_of(&q, req.seq), |e| {
        state.engine.leave_unstructured(&mut e.session, &path)?;
        Ok(Json(slot_response(&e.session, &path)))
    })
}

pub(crate) async fn delete_slot(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<SlotResponse>> {
    let req: SeqBody = body(&bytes)?;
    mutate(&state, &id, seq_of(&q, req.seq), |e| {
        state.engine.delete_optional_slot(&mut e.session, &path)?;
        Ok(Json(slot_response(&e.session, &path)))
    })
}

#[derive(Debug, Deserialize)]
struct OptionalBody {
    role: String,
    #[serde(default)]
    seq: Option<u64>,
}

pub(crate) async fn add_optional(
    State(state): Shared,
    Path((id, path)): Path<(String, String)>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Json<SlotResponse>> {
    let req: OptionalBody = required_body(&bytes)?;
    mutate(&state, &id, seq_of(&q, req.seq), |e| {
        state
            .engine
            .add_optional_slot(&mut e.session, &path, &req.role)?;
        let added = format!("{path}.{}", req.role);
        Ok(Json(slot_response(&e.session, &added)))
    })
}

#[derive(Debug, Deserialize)]
pub(crate) struct SuggestQuery {
    path: String,
    #[serde(default)]
    n: Option<usize>,
}

#[derive(Debug, Serialize)]
pub(crate) struct SuggestResponse {
    path: String,
    prior: String,
    committed: Option<Committed>,
    suggestions: Vec<CompletionCandidate>,
}

pub(crate) async fn suggestions(
    State(state): Shared,
    Path(id): Path<String>,
    Query(q): Query<SuggestQuery>,
) -> ApiResult<Json<SuggestResponse>> {
    blocking(move || {
        let cell = entry(&state, &id)?;
        let session = cell.lock().session.clone();
        let n = q.n.unwrap_or(DEFAULT_SUGGESTIONS);
        let ctx = slot_context(&session, &q.path)?;
        let rec = state.engine.recognizer();
        let retrieval = RetrievalGenerator::new(rec, state.corpus.clone());
        let suggestions = match &state.generator {
            Some(gen) => {
                match suggest_for_slot(rec, state.external.as_deref(), gen, &session, &q.path, n) {
                    Err(SuggestError::GeneratorUnavailable(why)) if !state.corpus.is_empty() => {
                        tracing::warn!("generator down, using retrieval: {why}");
                        suggest_for_slot(
                            rec,
                            state.external.as_deref(),
                            &retrieval,
                            &session,
                            &q.path,
                            n,
                        )?
                    }
                    other => other?,
                }
            }
            None => suggest_for_slot(
                rec,
                state.external.as_deref(),
                &retrieval,
                &session,
                &q.path,
                n,
            )?,
        };
        Ok(Json(SuggestResponse {
            path: q.path,
            prior: ctx.prior,
            committed: ctx.committed,
            suggestions,
        }))
    })
    .await
}

fn json_text(text: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], text).into_response()
}

pub(crate) async fn submit(
    State(state): Shared,
    Path(id): Path<String>,
    Query(q): Query<SeqQuery>,
    bytes: Bytes,
) -> ApiResult<Response> {
    let req: SeqBody = body(&bytes)?;
    mutate(&state, &id, seq_of(&q, req.seq), |e| {
        // convert on a copy so a rejected entry stays editable
        let mut next = e.session.clone();
        let root = state.engine.submit(&mut next)?;
        let ontology = state.engine.ontology();
        let rules = compose_rule(&next.template, &root, ontology, &format!("session:{id}"))?;
        validate_rules(&rules, ontology)?;
        e.session = next;
        let text = export(&rules, ExportFormat::Json);
        e.rules = Some(rules);
        Ok(json_text(text))
    })
}

#[derive(Debug, Default, Deserialize)]
pub(crate) struct RulesQuery {
    #[serde(default)]
    format: Option<String>,
}

pub(crate) async fn rules(
    State(state): Shared,
    Path(id): Path<String>,
    Query(q): Query<RulesQuery>,
) -> ApiResult<Response> {
    let cell = entry(&state, &id)?;
    let guard = cell.lock();
    let rules: &[HornRule] = guard.rules.as_deref().ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "not_submitted",
            "the session has not been submitted",
        )
    })?;
    match q.format.as_deref() {
        None | Some("json") => Ok(json_text(export(rules, ExportFormat::Json))),
        Some("logic_text") => Ok((
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            export(rules, ExportFormat::LogicText),
        )
            .into_response()),
        Some(other) => Err(ApiError::bad_request(format!("unknown format `{other}`"))),
    }
}

#[derive(Debug, Serialize)]
pub(crate) struct PolicyView {
    states: Vec<StateDef>,
    default_state: Option<String>,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    world_version: u64,
}

fn policy_view_of(p: &PolicyState) -> PolicyView {
    let doc = p.graph.document();
    PolicyView {
        states: doc.states.clone(),
        default_state: doc.default_state.clone(),
        nodes: p.graph.nodes().to_vec(),
        edges: p.graph.edges().to_vec(),
        world_version: p.world.version(),
    }
}

pub(crate) async fn policy_view(State(state): Shared) -> Json<PolicyView> {
    Json(policy_view_of(&state.policy.read()))
}

/// A whole policy document, or just rules to put in the configured one.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum BuildBody {
    Document(PolicyDocument),
    Rules(RuleSet),
}

/// Replaces the policy. The world starts over empty.
pub(crate) async fn policy_build(
    State(state): Shared,
    bytes: Bytes,
) -> ApiResult<Json<PolicyView>> {
    let doc = match required_body::<BuildBody>(&bytes)? {
        BuildBody::Document(d) => d,
        BuildBody::Rules(r) => state.base_policy.clone().with_rules(r),
    };
    let graph = build_policy(doc)?;
    let mut p = state.policy.write();
    *p = PolicyState {
        graph,
        world: World::new(),
    };
    Ok(Json(policy_view_of(&p)))
}

#[derive(Debug, Serialize)]
pub(crate) struct WorldResponse {
    world_version: u64,
    facts: usize,
    people: Vec<String>,
}

pub(crate) async fn policy_facts(
    State(state): Shared,
    bytes: Bytes,
) -> ApiResult<Json<WorldResponse>> {
    let doc: FactsDocument = required_body(&bytes)?;
    let mut p = state.policy.write();
    let world = assert_facts(&p.graph, &p.world, &doc.facts)?;
    p.world = world;
    Ok(Json(WorldResponse {
        world_version: p.world.version(),
        facts: p.world.len(),
        people: people(&p.graph, &p.world).into_iter().collect(),
    }))
}

#[derive(Debug, Deserialize)]
pub(crate) struct PolicyQuery {
    asof: NaiveDate,
    #[serde(default)]
    state: Option<String>,
}

pub(crate) async fn policy_query(
    State(state): Shared,
    Query(q): Query<PolicyQuery>,
) -> ApiResult<Json<Report>> {
    let p = state.policy.read();
    Ok(Json(query(&p.graph, &p.world, q.asof, q.state.as_deref())?))
}
