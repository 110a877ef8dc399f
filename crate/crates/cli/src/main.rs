//! `skate`: operator commands. Exit status is 0 on success, 1 on a domain
//! error and 2 on a usage error.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use skate_core::config::{Config, ConfigError};
use skate_core::converter::{
    compose_rule, export, validate_rules, ExportFormat, HornRule, RuleSet,
};
use skate_core::eval::{evaluate, parse_corpus, EvalReport};
use skate_core::ontology::{parse_ontology, OntologyError};
use skate_core::policy::{
    assert_facts, build_policy, query, render_report, FactsDocument, PolicyDocument, PolicyGraph,
    World, WorldFact,
};
use skate_core::recognizer::{ExternalParser, HttpParserClient, Recognizer};
use skate_core::session::{Session, SessionEvent, Status};
use skate_core::suggest::{
    filter_compatible, Committed, Generator, HttpGenerator, RetrievalGenerator,
};
use skate_service::AppState;

#[derive(Debug, Parser)]
#[command(
    name = "skate",
    version,
    about = "Frame-based knowledge authoring and policy queries"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(flatten)]
    resources: Resources,
    #[command(subcommand)]
    command: Command,
}

/// Overrides for the configured resource files.
#[derive(Debug, Args)]
struct Resources {
    #[arg(long, global = true)]
    ontology: Option<PathBuf>,
    #[arg(long, global = true)]
    vectors: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the HTTP API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
    },
    /// Print the ranked interpretations of a sentence.
    Parse {
        #[arg(long)]
        text: String,
        #[arg(long)]
        k: Option<usize>,
        /// Supervised parser endpoint, tried before the local parser.
        #[arg(long)]
        external: Option<String>,
    },
    /// Completions for a slot, filtered by the committed frame and role.
    Suggest {
        #[arg(long)]
        prior: String,
        #[arg(long)]
        frame: String,
        #[arg(long)]
        role: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Completion service endpoint; the corpus is used otherwise.
        #[arg(long)]
        generator: Option<String>,
    },
    /// Check an ontology file; problems go to stderr as JSON lines.
    ValidateOntology { path: PathBuf },
    /// Frame accuracy and span F1 over an annotated corpus.
    Eval {
        /// Annotated sentences, one JSON record per line. Defaults to the
        /// bundled corpus.
        #[arg(long = "examples")]
        examples: Option<PathBuf>,
        #[arg(long)]
        min_accuracy: Option<f64>,
        #[arg(long)]
        min_f1: Option<f64>,
    },
    /// Rules from recorded session event logs.
    ExportRules {
        /// Event logs, as JSON arrays or one event per line.
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Compliance policy kept in a local store.
    Policy {
        /// Directory holding the current policy and world.
        #[arg(long, default_value = ".skate")]
        store: PathBuf,
        #[command(subcommand)]
        command: PolicyCommand,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    LogicText,
}

#[derive(Debug, Subcommand)]
enum PolicyCommand {
    /// Install rules (or a whole policy document); clears the world.
    Build { rules: PathBuf },
    /// Add dated facts to the world.
    Assert { facts: PathBuf },
    /// Per-person status on a date.
    Query {
        #[arg(long)]
        asof: NaiveDate,
        #[arg(long)]
        state: Option<String>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Domain(String),
    /// Already reported on stderr.
    #[error("{0}")]
    Reported(String),
}

type CliResult = Result<(), CliError>;

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::Domain(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes to stdout; a closed pipe (`skate ... | head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

macro_rules! outln {
    ($($t:tt)*) => {
        emit(&format!("{}\n", format_args!($($t)*)))
    };
}

fn print_json<T: Serialize>(value: &T) {
    emit(&(serde_json::to_string_pretty(value).expect("serializable output") + "\n"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Reported(_)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    let r = &cli.resources;
    for (flag, slot) in [
        (&r.ontology, &mut cfg.paths.ontology),
        (&r.vectors, &mut cfg.paths.vectors),
        (&r.stopwords, &mut cfg.paths.stopwords),
        (&r.corpus, &mut cfg.paths.corpus),
    ] {
        if let Some(p) = flag {
            *slot = Some(p.clone());
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> CliResult {
    let json = cli.json;
    match &cli.command {
        Command::ValidateOntology { path } => validate_ontology(path, json),
        Command::Serve { bind } => {
            let mut cfg = load_config(&cli)?;
            if let Some(b) = bind {
                cfg.server.bind = b.clone();
            }
            serve(&cfg)
        }
        Command::Parse { text, k, external } => {
            let mut cfg = load_config(&cli)?;
            if let Some(k) = k {
                cfg.recognizer.k = *k;
            }
            let rec = cfg.recognizer()?;
            let client: Option<Arc<dyn ExternalParser>> = match external {
                Some(url) => Some(Arc::new(HttpParserClient::new(url.clone()))),
                None => cfg.external_parser(),
            };
            let mut out = rec.parse(text, client.as_deref());
            out.truncate(rec.config().k.max(1));
            print_json(&out);
            Ok(())
        }
        Command::Suggest {
            prior,
            frame,
            role,
            n,
            generator,
        } => {
            let cfg = load_config(&cli)?;
            suggest(&cfg, prior, frame, role, *n, generator.as_deref(), json)
        }
        Command::Eval {
            examples,
            min_accuracy,
            min_f1,
        } => {
            let cfg = load_config(&cli)?;
            let rec = cfg.recognizer()?;
            let src = match examples {
                Some(p) => read(p)?,
                None => skate_core::fixtures::EVAL_CORPUS.to_string(),
            };
            let corpus = parse_corpus(&src).map_err(domain)?;
            let report =
                evaluate(&rec, &corpus, cfg.external_parser().as_deref()).map_err(domain)?;
            if json {
                print_json(&report);
            } else {
                print_eval(&report);
            }
            check_floor("frame accuracy", report.frame_top1_accuracy, *min_accuracy)?;
            check_floor("span F1", report.span_f1, *min_f1)
        }
        Command::ExportRules { logs, format } => {
            let cfg = load_config(&cli)?;
            export_rules(&cfg.recognizer()?, logs, *format)
        }
        Command::Policy { store, command } => {
            let cfg = load_config(&cli)?;
            policy(&cfg, store, command, json)
        }
    }
}

fn check_floor(what: &str, value: f64, floor: Option<f64>) -> CliResult {
    match floor {
        Some(f) if value < f => Err(CliError::Domain(format!("{what} {value:.3} is below {f}"))),
        _ => Ok(()),
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    path: &'a Path,
    #[serde(flatten)]
    issue: serde_json::Value,
}

fn validate_ontology(path: &Path, json: bool) -> CliResult {
    let src = read(path)?;
    match parse_ontology(&src) {
        Ok(onto) => {
            if json {
                print_json(
                    &serde_json::json!({ "path": path, "valid": true, "frames": onto.frames().len() }),
                );
            } else {
                outln!("{}: {} frames, valid", path.display(), onto.frames().len());
            }
            Ok(())
        }
        Err(e) => {
            let issues: Vec<serde_json::Value> = match &e {
                OntologyError::Validation(list) => list
                    .iter()
                    .map(|i| serde_json::to_value(i).expect("issue serializes"))
                    .collect(),
                OntologyError::Parse {
                    line,
                    column,
                    message,
                } => {
                    vec![
                        serde_json::json!({"code": "parse", "line": line, "column": column, "message": message}),
                    ]
                }
                other => vec![serde_json::json!({"code": "error", "message": other.to_string()})],
            };
            let mut err = std::io::stderr().lock();
            for issue in issues {
                let line = serde_json::to_string(&Diagnostic { path, issue })
                    .expect("diagnostic serializes");
                let _ = writeln!(err, "{line}");
            }
            Err(CliError::Reported(e.to_string()))
        }
    }
}

fn serve(cfg: &Config) -> CliResult {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    let state = Arc::new(AppState::from_config(cfg)?);
    let rt = tokio::runtime::Runtime::new().map_err(domain)?;
    rt.block_on(skate_service::serve(state, &cfg.server.bind))
        .map_err(domain)
}

fn suggest(
    cfg: &Config,
    prior: &str,
    frame: &str,
    role: &str,
    n: usize,
    url: Option<&str>,
    json: bool,
) -> CliResult {
    let rec = cfg.recognizer()?;
    let roles = rec.ontology().resolve_roles(frame).map_err(domain)?;
    if !roles.iter().any(|r| r.name == role && !r.is_focal()) {
        return Err(CliError::Domain(format!(
            "frame `{frame}` has no role `{role}`"
        )));
    }
    let remote = url
        .map(|u| HttpGenerator::new(u.to_string()))
        .or_else(|| cfg.generator());
    let candidates = match &remote {
        Some(g) => g.generate(prior, n),
        None => RetrievalGenerator::new(&rec, cfg.corpus_lines()?).generate(prior, n),
    }
    .map_err(domain)?;
    let committed = Committed {
        frame: frame.to_string(),
        role: role.to_string(),
    };
    let kept = filter_compatible(
        &rec,
        cfg.external_parser().as_deref(),
        &candidates,
        Some(&committed),
    );
    if json {
        print_json(&kept);
    } else {
        for c in &kept {
            outln!("{:.3}  {}", c.score, c.text);
        }
    }
    Ok(())
}

fn print_eval(r: &EvalReport) {
    outln!("sentences        {}", r.sentences);
    outln!("frame accuracy   {:.3}", r.frame_top1_accuracy);
    outln!("span precision   {:.3}", r.span_precision);
    outln!("span recall      {:.3}", r.span_recall);
    outln!("span F1          {:.3}", r.span_f1);
    let misses: Vec<String> = r
        .confusion
        .iter()
        .flat_map(|(gold, row)| {
            row.iter()
                .filter(move |(p, _)| *p != gold)
                .map(move |(p, n)| format!("  {gold} -> {p}: {n}"))
        })
        .collect();
    if !misses.is_empty() {
        outln!("confusions");
        for m in misses {
            outln!("{m}");
        }
    }
}

fn read_events(path: &Path) -> Result<Vec<SessionEvent>, CliError> {
    let src = read(path)?;
    let bad = |e: serde_json::Error| CliError::Domain(format!("{}: {e}", path.display()));
    if src.trim_start().starts_with('[') {
        return serde_json::from_str(&src).map_err(bad);
    }
    src.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(bad))
        .collect()
}

fn export_rules(rec: &Recognizer, logs: &[PathBuf], format: Format) -> CliResult {
    let mut by_session: BTreeMap<String, Vec<SessionEvent>> = BTreeMap::new();
    for path in logs {
        for ev in read_events(path)? {
            by_session.entry(ev.session.clone()).or_default().push(ev);
        }
    }
    let mut rules: Vec<HornRule> = Vec::new();
    for (id, mut events) in by_session {
        events.sort_by_key(|e| e.seq);
        let session = Session::replay(&events, rec.ontology())
            .map_err(|e| CliError::Domain(format!("session {id}: {e}")))?;
        if session.status != Status::Submitted {
            eprintln!("skipping session {id}: not submitted");
            continue;
        }
        let composed = compose_rule(
            &session.template,
            &session.root,
            rec.ontology(),
            &format!("session:{id}"),
        )
        .map_err(|e| CliError::Domain(format!("session {id}: {e}")))?;
        validate_rules(&composed, rec.ontology())
            .map_err(|e| CliError::Domain(format!("session {id}: {e}")))?;
        rules.extend(composed);
    }
    let fmt = match format {
        Format::Json => ExportFormat::Json,
        Format::LogicText => ExportFormat::LogicText,
    };
    emit(&export(&rules, fmt));
    Ok(())
}

const POLICY_FILE: &str = "policy.json";
const FACTS_FILE: &str = "facts.json";

/// The stored policy, or the configured one if nothing was built yet.
fn stored_policy(cfg: &Config, store: &Path) -> Result<PolicyDocument, CliError> {
    let path = store.join(POLICY_FILE);
    if path.exists() {
        PolicyDocument::parse(&read(&path)?).map_err(domain)
    } else {
        Ok(cfg.policy()?)
    }
}

/// Asserted facts, one batch per `policy assert`, so world versions
/// survive between runs.
#[derive(Debug, Default, Serialize, Deserialize)]
struct StoredWorld {
    batches: Vec<Vec<WorldFact>>,
}

fn stored_world(store: &Path) -> Result<StoredWorld, CliError> {
    let path = store.join(FACTS_FILE);
    if !path.exists() {
        return Ok(StoredWorld::default());
    }
    serde_json::from_str(&read(&path)?)
        .map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

fn save_world(store: &Path, stored: &StoredWorld) -> CliResult {
    write(
        &store.join(FACTS_FILE),
        &(serde_json::to_string_pretty(stored).expect("facts serialize") + "\n"),
    )
}

fn world_of(graph: &PolicyGraph, stored: &StoredWorld) -> Result<World, CliError> {
    stored.batches.iter().try_fold(World::new(), |w, batch| {
        assert_facts(graph, &w, batch).map_err(domain)
    })
}

fn policy(cfg: &Config, store: &Path, command: &PolicyCommand, json: bool) -> CliResult {
    match command {
        PolicyCommand::Build { rules } => {
            let src = read(rules)?;
            let doc = match PolicyDocument::parse(&src) {
                Ok(doc) => doc,
                Err(_) => {
                    let set: RuleSet = serde_json::from_str(&src)
                        .map_err(|e| CliError::Domain(format!("{}: {e}", rules.display())))?;
                    cfg.policy()?.with_rules(set)
                }
            };
            let graph = build_policy(doc.clone()).map_err(domain)?;
            write(
                &store.join(POLICY_FILE),
                &serde_json::to_string_pretty(&doc).expect("policy serializes"),
            )?;
            save_world(store, &StoredWorld::default())?;
            if json {
                print_json(&serde_json::json!({ "nodes": graph.nodes(), "edges": graph.edges() }));
            } else {
                outln!("{} states, {} rules", doc.states.len(), doc.rules.len());
                for e in graph.edges() {
                    outln!("  {} -> {}  (rule {})", e.from, e.to, e.rule);
                }
            }
            Ok(())
        }
        PolicyCommand::Assert { facts } => {
            let graph = build_policy(stored_policy(cfg, store)?).map_err(domain)?;
            let incoming: FactsDocument = serde_json::from_str(&read(facts)?)
                .map_err(|e| CliError::Domain(format!("{}: {e}", facts.display())))?;
            let mut stored = stored_world(store)?;
            stored.batches.push(incoming.facts);
            let world = world_of(&graph, &stored)?;
            save_world(store, &stored)?;
            let facts: usize = stored.batches.iter().map(Vec::len).sum();
            if json {
                print_json(
                    &serde_json::json!({ "world_version": world.version(), "facts": facts }),
                );
            } else {
                outln!("world version {}, {facts} facts", world.version());
            }
            Ok(())
        }
        PolicyCommand::Query { asof, state } => {
            let graph = build_policy(stored_policy(cfg, store)?).map_err(domain)?;
            let world = world_of(&graph, &stored_world(store)?)?;
            let report = query(&graph, &world, *asof, state.as_deref()).map_err(domain)?;
            if json {
                print_json(&report);
            } else {
                emit(&render_report(&report));
            }
            Ok(())
        }
    }
}
