use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Where a command writes its result.
pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    pub fn emit(&self, text: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                stdout.flush()
            }
        }
    }
}

/// The stable JSON envelope shared by every command.
pub fn envelope(command: &str, prime: Option<u64>, params: Value, result: Value, seed: Option<u64>) -> Value {
    json!({
        "command": command,
        "prime": prime,
        "params": params,
        "result": result,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
    })
}

pub fn to_json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Renders rows as CSV, quoting fields that need it.
pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let fields: Vec<String> = row.iter().map(|f| quote(f)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Flattens a JSON object into `key,value` rows, joining nested keys with `.`.
pub fn flatten(prefix: &str, v: &Value, rows: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, rows);
            }
        }
        Value::String(s) => rows.push(vec![prefix.to_string(), s.clone()]),
        Value::Null => rows.push(vec![prefix.to_string(), String::new()]),
        other => rows.push(vec![prefix.to_string(), other.to_string()]),
    }
}
