//! Argument parsing and the one-shot commands.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::IpAddr;
use std::path::{Path, PathBuf};

use argdec::logic::Atom;
use argdec::model::{salient_paths, SalientModel};
use argdec::session::{Session, SessionError};
use argdec::{
    dot, justify, parse, parse_literal, recommend, serialize, Document, DslError, EngineConfig,
    EngineError, Fallback, Literal, Trace, Value,
};
use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use crate::{render, repl, service};

#[derive(Debug, Parser)]
#[command(name = "argdec", version, about = "Weigh decisions as defeasible arguments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Comma-separated act order used when the arguments leave a tie.
    #[arg(long, global = true, value_delimiter = ',', value_name = "ACTS")]
    pub fallback: Option<Vec<String>>,
    /// Rule expansions allowed per query.
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<usize>,
    /// Largest conjunction split into additive parts.
    #[arg(long, global = true, value_name = "N")]
    pub max_arity: Option<usize>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verdict on one literal.
    Justify { file: PathBuf, literal: String },
    /// Which act the arguments support.
    Recommend { file: PathBuf },
    /// Every argument about a literal, with labels and attacks.
    Trace { file: PathBuf, literal: String },
    /// The dialectic about a literal as a Graphviz graph.
    Dot { file: PathBuf, literal: String },
    /// Paths from the acts to states valued at least `threshold` in size.
    Salient {
        file: PathBuf,
        threshold: String,
        depth: usize,
    },
    /// Add statements one line at a time and watch the recommendation.
    Repl { file: PathBuf },
    /// Serve a deliberation session over HTTP.
    Serve {
        file: PathBuf,
        #[arg(long)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Usage(String),
    Parse(String),
    Engine(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Parse(_) => 2,
            Failure::Engine(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Parse(m) | Failure::Engine(m) => m,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Usage(_) => "usage",
            Failure::Parse(_) => "parse",
            Failure::Engine(_) => "engine",
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Engine(e.to_string())
    }
}

pub struct Io<'a> {
    pub input: &'a mut dyn BufRead,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(argv: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(io.out, "{text}");
            } else {
                let _ = write!(io.err, "{text}");
            }
            return code;
        }
    };
    let json = cli.json;
    match execute(cli, io) {
        Ok(()) => 0,
        Err(f) => {
            if json {
                let body = json!({"error": {"kind": f.kind(), "message": f.message()}});
                let _ = writeln!(io.err, "{body}");
            } else {
                let _ = writeln!(io.err, "argdec: {}", f.message());
            }
            f.code()
        }
    }
}

pub fn config(cli: &Cli) -> EngineConfig {
    let mut c = EngineConfig::default();
    if let Some(b) = cli.budget {
        c.budget = b;
    }
    if let Some(a) = cli.max_arity {
        c.max_arity = a;
    }
    c
}

pub fn fallback(cli: &Cli, doc: &Document) -> Result<Fallback, Failure> {
    let Some(order) = &cli.fallback else {
        return Ok(Fallback::None);
    };
    let mut acts = Vec::new();
    for a in order.iter().map(|a| a.trim()).filter(|a| !a.is_empty()) {
        if !doc.model.acts().iter().any(|m| m.as_ref() == a) {
            return Err(Failure::Usage(format!("--fallback: unknown act `{a}`")));
        }
        acts.push(a.into());
    }
    Ok(Fallback::Inclination(acts))
}

pub fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read `{}`: {e}", path.display())))
}

/// `file:line:column: message`, followed by the offending source line.
pub fn located(path: &Path, text: &str, e: &DslError) -> String {
    let mut msg = format!("{}:{}:{}: {}", path.display(), e.line, e.column, e.message);
    if let Some(src) = text.lines().nth(e.line.saturating_sub(1)) {
        msg.push_str(&format!("\n  | {}", src.trim_end()));
    }
    msg
}

pub fn load(path: &Path) -> Result<(String, Document), Failure> {
    let text = read(path)?;
    let doc = parse(&text).map_err(|e| Failure::Parse(located(path, &text, &e)))?;
    Ok((text, doc))
}

pub fn goal(text: &str) -> Result<Literal, Failure> {
    parse_literal(text).map_err(|e| {
        Failure::Parse(format!("literal `{text}`: column {}: {}", e.column, e.message))
    })
}

fn emit(out: &mut dyn Write, value: &Json) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("json");
    writeln!(out, "{text}").map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

fn print(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    write!(out, "{text}").map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

pub fn trace_json(command: &str, t: &Trace) -> Json {
    json!({"command": command, "trace": t})
}

/// The salient model as DSL text, keeping only facts about kept states.
pub fn salient_text(doc: &Document, s: &SalientModel) -> String {
    let mut kb = doc.kb.clone();
    kb.contingent.retain(|l| {
        let state = match &l.atom {
            Atom::Holds { state, .. }
            | Atom::Utility { state, .. }
            | Atom::Assess { state, .. }
            | Atom::Prob { state, .. } => Some(state),
            _ => None,
        };
        state.is_none_or(|st| s.model.has_state(st))
    });
    serialize(&Document {
        statements: Vec::new(),
        kb,
        model: s.model.clone(),
    })
}

fn execute(cli: Cli, io: &mut Io<'_>) -> Result<(), Failure> {
    let cfg = config(&cli);
    match &cli.command {
        Command::Justify { file, literal } | Command::Trace { file, literal } => {
            let (_, doc) = load(file)?;
            let g = goal(literal)?;
            let t = justify(&doc.kb, &doc.model, &g, &cfg)?;
            let name = match cli.command {
                Command::Justify { .. } => "justify",
                _ => "trace",
            };
            if cli.json {
                emit(io.out, &trace_json(name, &t))
            } else if name == "justify" {
                print(io.out, &format!("{}\n", render::verdict_line(&t)))
            } else {
                print(io.out, &render::trace(&t))
            }
        }
        Command::Recommend { file } => {
            let (_, doc) = load(file)?;
            let fb = fallback(&cli, &doc)?;
            let r = recommend(&doc.kb, &doc.model, &fb, &cfg)?;
            if cli.json {
                emit(io.out, &json!({"command": "recommend", "recommendation": r}))
            } else {
                print(io.out, &render::recommendation(&r))
            }
        }
        Command::Dot { file, literal } => {
            let (_, doc) = load(file)?;
            let g = goal(literal)?;
            let t = justify(&doc.kb, &doc.model, &g, &cfg)?;
            let graph = dot::export_dot(&t);
            if cli.json {
                emit(io.out, &json!({"command": "dot", "dot": graph, "trace": t}))
            } else {
                print(io.out, &graph)
            }
        }
        Command::Salient {
            file,
            threshold,
            depth,
        } => {
            let (_, doc) = load(file)?;
            let th: Value = threshold
                .parse()
                .map_err(|e| Failure::Usage(format!("<threshold> `{threshold}`: {e}")))?;
            if !th.is_positive() {
                return Err(Failure::Usage(format!(
                    "<threshold> `{threshold}`: must be positive"
                )));
            }
            let s = salient_paths(&doc.model, &doc.kb, &th, *depth)
                .map_err(|e| Failure::Engine(e.to_string()))?;
            let text = salient_text(&doc, &s);
            if cli.json {
                emit(
                    io.out,
                    &json!({
                        "command": "salient",
                        "threshold": th,
                        "depth": depth,
                        "salient": s.salient,
                        "paths": s.paths,
                        "coverage": s.coverage,
                        "notice": s.notice,
                        "model": text,
                    }),
                )
            } else {
                print(io.out, &render::salient(&s, &text))
            }
        }
        Command::Repl { file } => {
            let session = open_session(&cli, file, &cfg)?;
            repl::run(session, cli.json, io)
        }
        Command::Serve { file, port, host } => {
            let session = open_session(&cli, file, &cfg)?;
            serve(session, *host, *port, cli.json, io)
        }
    }
}

fn open_session(cli: &Cli, file: &Path, cfg: &EngineConfig) -> Result<Session, Failure> {
    let (text, doc) = load(file)?;
    let fb = fallback(cli, &doc)?;
    let id = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "session".into());
    Session::new(id, &text, cfg.clone(), fb).map_err(|e| match e {
        SessionError::Parse(e) => Failure::Parse(located(file, &text, &e)),
        other => Failure::Engine(other.to_string()),
    })
}

fn serve(session: Session, host: IpAddr, port: u16, json: bool, io: &mut Io<'_>) -> Result<(), Failure> {
    let rt = tokio::runtime::Runtime::new()
        .map_err(|e| Failure::Usage(format!("cannot start runtime: {e}")))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port))
            .await
            .map_err(|e| Failure::Usage(format!("--port {port}: {e}")))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Failure::Usage(format!("--port {port}: {e}")))?;
        if json {
            emit(io.out, &json!({"command": "serve", "address": format!("http://{addr}")}))?;
        } else {
            print(io.out, &format!("listening on http://{addr}\n"))?;
        }
        let _ = io.out.flush();
        axum::serve(listener, service::router(session))
            .await
            .map_err(|e| Failure::Usage(format!("server stopped: {e}")))
    })
}
