//! The `orbitlab` experiment harness: read a TOML manifest, run one command
//! against the core library and emit a JSON report.

pub mod commands;
pub mod manifest;

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use commands::{dispatch, CommandError, Settings};
use manifest::{Manifest, ManifestError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_UNKNOWN_COMMAND: i32 = 64;
pub const EXIT_MALFORMED: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

pub const DEFAULT_PRECISION: i64 = 40;
pub const DEFAULT_SEED: u64 = 0;
pub const PRECISION_ENV: &str = "ORBITLAB_PRECISION";

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub manifest: PathBuf,
    pub out: Option<PathBuf>,
    pub precision: Option<i64>,
    pub seed: Option<u64>,
    pub pretty: bool,
}

/// The report text, its destination (None for stdout) and the exit code.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub code: i32,
    pub report: String,
    pub out: Option<PathBuf>,
}

fn error_body(command: &str, kind: &str, message: &str, bounds: Value) -> Value {
    json!({ "command": command, "bounds": bounds, "error": { "kind": kind, "message": message } })
}

fn render(v: &Value, pretty: bool) -> String {
    let mut s = if pretty { serde_json::to_string_pretty(v) } else { serde_json::to_string(v) }.expect("json");
    s.push('\n');
    s
}

/// Flag, then manifest, then environment, then the built-in default.
fn resolve_precision(flag: Option<i64>, manifest: Option<i64>) -> Result<i64, String> {
    if let Some(m) = flag.or(manifest) {
        return Ok(m);
    }
    match std::env::var(PRECISION_ENV) {
        Ok(s) => match s.trim().parse::<i64>() {
            Ok(m) if m > 0 => Ok(m),
            _ => Err(format!("{PRECISION_ENV} must be a positive integer, got '{s}'")),
        },
        Err(_) => Ok(DEFAULT_PRECISION),
    }
}

fn manifest_error(command: &str, e: ManifestError) -> (i32, Value) {
    let (code, kind, msg) = match e {
        ManifestError::Io(m) => (EXIT_NO_INPUT, "io", m),
        ManifestError::Malformed(m) => (EXIT_MALFORMED, "malformed_spec", m),
        ManifestError::UnknownCommand(c) => (EXIT_UNKNOWN_COMMAND, "unknown_command", format!("unknown command '{c}'")),
    };
    (code, error_body(command, kind, &msg, Value::Object(Map::new())))
}

/// Run a manifest given as text; relative paths resolve against `base`.
pub fn run_text(text: &str, base: &Path, opts: &Options) -> Outcome {
    let mut m = match Manifest::parse(text, base) {
        Ok(m) => m,
        Err(e) => {
            let name = match &e {
                ManifestError::UnknownCommand(c) => c.clone(),
                _ => String::new(),
            };
            let (code, body) = manifest_error(&name, e);
            return Outcome { code, report: render(&body, opts.pretty), out: opts.out.clone() };
        }
    };
    let out = opts.out.clone().or_else(|| m.out.clone());
    let command = m.command.clone();
    let precision = match resolve_precision(opts.precision, m.precision) {
        Ok(p) => p,
        Err(msg) => {
            let body = error_body(&command, "malformed_spec", &msg, Value::Object(Map::new()));
            return Outcome { code: EXIT_MALFORMED, report: render(&body, opts.pretty), out };
        }
    };
    let seed = opts.seed.or(m.seed).unwrap_or(DEFAULT_SEED);
    let settings = Settings { precision, seed };
    let result = dispatch(&command, &mut m, &settings);
    let mut bounds = m.bounds();
    bounds["precision"] = json!(precision);
    bounds["seed"] = json!(seed);
    let (code, body) = match result {
        Ok(Value::Object(fields)) => {
            let mut body = Map::new();
            body.insert("command".into(), json!(command));
            body.insert("bounds".into(), bounds);
            for (k, v) in fields {
                body.entry(k).or_insert(v);
            }
            (EXIT_OK, Value::Object(body))
        }
        Ok(other) => (EXIT_OK, json!({ "command": command, "bounds": bounds, "result": other })),
        Err(CommandError::Manifest(e)) => {
            let (code, mut body) = manifest_error(&command, e);
            body["bounds"] = bounds;
            (code, body)
        }
        Err(CommandError::Core(e)) => {
            let code = if matches!(e, orbitlab_core::Error::Parse(_)) { EXIT_MALFORMED } else { EXIT_PRECONDITION };
            (code, error_body(&command, e.kind(), &e.to_string(), bounds))
        }
    };
    Outcome { code, report: render(&body, opts.pretty), out }
}

/// Read the manifest named in `opts` and run it.
pub fn run(opts: &Options) -> Outcome {
    match std::fs::read_to_string(&opts.manifest) {
        Ok(text) => {
            let base = opts.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
            run_text(&text, &base, opts)
        }
        Err(e) => {
            let msg = format!("{}: {e}", opts.manifest.display());
            let body = error_body("", "io", &msg, Value::Object(Map::new()));
            Outcome { code: EXIT_NO_INPUT, report: render(&body, opts.pretty), out: opts.out.clone() }
        }
    }
}
