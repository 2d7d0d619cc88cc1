#![allow(dead_code)]

use std::io::Cursor;
use std::path::PathBuf;

use argdec_cli::{run, Io};
use jsonschema::Validator;
use serde_json::{json, Value};

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn corpus(name: &str) -> String {
    root().join("corpus").join(name).display().to_string()
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus(name)).unwrap()
}

pub const GOLDEN: [&str; 7] = [
    "alfa_modelA.kb",
    "alfa.kb",
    "alfa_qualitative.kb",
    "alfa_qualitative_combined.kb",
    "smoking.kb",
    "reinstatement.kb",
    "empty.kb",
];

pub struct Outcome {
    pub code: i32,
    pub out: String,
    pub err: String,
}

/// Runs the CLI in process with `input` as standard input.
pub fn cli(args: &[&str], input: &str) -> Outcome {
    let mut stdin = Cursor::new(input.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("argdec").chain(args.iter().copied());
    let code = run(
        argv,
        &mut Io {
            input: &mut stdin,
            out: &mut out,
            err: &mut err,
        },
    );
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn schema_doc() -> Value {
    let text = std::fs::read_to_string(root().join("docs/trace.schema.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Validator for the whole document, or for one of its `$defs`.
pub fn validator(def: Option<&str>) -> Validator {
    let mut doc = schema_doc();
    if let Some(name) = def {
        let defs = doc["$defs"].clone();
        doc = json!({
            "$schema": doc["$schema"],
            "$defs": defs,
            "$ref": format!("#/$defs/{name}"),
        });
    }
    jsonschema::validator_for(&doc).unwrap()
}

pub fn assert_valid(v: &Validator, instance: &Value, what: &str) {
    let errors: Vec<String> = v.iter_errors(instance).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{what}: {errors:#?}");
}
