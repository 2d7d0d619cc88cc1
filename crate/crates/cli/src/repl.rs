//! Line-oriented deliberation over a session.
//!
//! Plain input is DSL; a statement may span lines and ends with a line
//! ending in `.`. Commands start with `:`.

use std::io::Write;

use argdec::dot;
use argdec::session::{Session, SessionError, WriteResult};
use serde_json::{json, Value as Json};

use crate::cli::{Failure, Io};
use crate::render;

const HELP: &str = "\
:why <literal>    verdict on a literal
:trace <literal>  all arguments about a literal
:dot <literal>    the dialectic as a Graphviz graph
:rec              current recommendation
:show             the document so far
:undo             drop the last statement
:quit             leave
";

enum Reply {
    Text(String),
    Json(Json),
}

fn error(e: &SessionError) -> Json {
    let kind = match e {
        SessionError::Parse(_) => "parse",
        SessionError::Conflict { .. } => "conflict",
        SessionError::NothingToUndo => "empty_history",
        SessionError::Engine(_) => "engine",
    };
    json!({"command": "error", "error": {"kind": kind, "message": e.to_string()}})
}

fn written(command: &str, w: &WriteResult) -> (String, Json) {
    let mut text = format!("[{}] {}\n", w.revision, w.recommendation.summary);
    if w.delta.flipped {
        text.push_str(&format!("flip: {} -> {}\n", w.delta.before, w.delta.after));
    }
    for v in &w.delta.verdicts {
        text.push_str(&format!("  {}: {} -> {}\n", v.act, v.before, v.after));
    }
    let mut body = serde_json::to_value(w).expect("json");
    body["command"] = json!(command);
    (text, body)
}

fn step(session: &mut Session, line: &str, as_json: bool) -> Result<Reply, SessionError> {
    let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
    let rest = rest.trim();
    let pick = |text: String, body: Json| {
        if as_json {
            Reply::Json(body)
        } else {
            Reply::Text(text)
        }
    };
    Ok(match cmd {
        ":help" => pick(HELP.to_string(), json!({"command": "help", "text": HELP})),
        ":why" | ":trace" | ":dot" => {
            let t = session.query(rest)?;
            let text = match cmd {
                ":why" => format!("{}\n", render::verdict_line(&t)),
                ":trace" => render::trace(&t),
                _ => dot::export_dot(&t),
            };
            let mut body = json!({"command": &cmd[1..], "revision": session.revision(), "trace": t});
            if cmd == ":dot" {
                body["dot"] = json!(dot::export_dot(&t));
            }
            pick(text, body)
        }
        ":rec" => {
            let r = session.recommendation();
            pick(
                render::recommendation(r),
                json!({"command": "rec", "revision": session.revision(), "recommendation": r}),
            )
        }
        ":show" => {
            let s = session.snapshot();
            pick(
                s.document.clone(),
                json!({"command": "show", "revision": s.revision, "document": s.document}),
            )
        }
        ":undo" => {
            let w = session.undo(None)?;
            let (text, body) = written("undo", &w);
            pick(text, body)
        }
        _ => {
            let w = session.add(line, None)?;
            let (text, body) = written("add", &w);
            pick(text, body)
        }
    })
}

fn say(out: &mut dyn Write, reply: Reply) -> Result<(), Failure> {
    let r = match reply {
        Reply::Text(t) => write!(out, "{t}"),
        Reply::Json(j) => writeln!(out, "{j}"),
    };
    r.map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
}

pub fn run(mut session: Session, as_json: bool, io: &mut Io<'_>) -> Result<(), Failure> {
    let start = session.recommendation().clone();
    say(
        io.out,
        if as_json {
            Reply::Json(json!({"command": "open", "revision": 0, "recommendation": start}))
        } else {
            Reply::Text(format!("[0] {}\n", start.summary))
        },
    )?;
    let mut pending = String::new();
    let mut line = String::new();
    loop {
        line.clear();
        let n = io
            .input
            .read_line(&mut line)
            .map_err(|e| Failure::Usage(format!("cannot read input: {e}")))?;
        if n == 0 {
            break;
        }
        let trimmed = line.trim();
        if pending.is_empty() {
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            if trimmed == ":quit" || trimmed == ":q" {
                break;
            }
            if trimmed.starts_with(':') {
                let reply = step(&mut session, trimmed, as_json);
                answer(io, reply, as_json)?;
                continue;
            }
        }
        pending.push_str(&line);
        if trimmed.ends_with('.') {
            let text = std::mem::take(&mut pending);
            let reply = step(&mut session, text.trim(), as_json);
            answer(io, reply, as_json)?;
        }
    }
    if !pending.trim().is_empty() {
        let reply = step(&mut session, pending.trim(), as_json);
        answer(io, reply, as_json)?;
    }
    Ok(())
}

fn answer(io: &mut Io<'_>, reply: Result<Reply, SessionError>, as_json: bool) -> Result<(), Failure> {
    match reply {
        Ok(r) => say(io.out, r),
        Err(e) if as_json => say(io.out, Reply::Json(error(&e))),
        Err(e) => {
            let _ = writeln!(io.err, "error: {e}");
            Ok(())
        }
    }
}
