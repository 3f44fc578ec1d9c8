use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

/// What a command did: the invocation, digests of every input, and results
/// in insertion order. Timing is only present when asked for, so reports are
/// byte-identical across runs by default.
pub struct RunReport {
    command: String,
    inputs: Vec<(String, String)>,
    status: String,
    results: Map<String, Value>,
    timing_ms: Option<f64>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: Vec::new(),
            status: String::new(),
            results: Map::new(),
            timing_ms: None,
        }
    }

    pub fn input(&mut self, path: &str, bytes: &[u8]) {
        self.inputs.push((path.to_string(), sha256_hex(bytes)));
    }

    pub fn status(&mut self, s: &str) {
        self.status = s.to_string();
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.results.insert(key.to_string(), value.into());
    }

    pub fn timing(&mut self, ms: f64) {
        self.timing_ms = Some(ms);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Structured => {
                let mut v = json!({
                    "command": self.command,
                    "inputs": self.inputs.iter().map(|(p, h)| json!({"path": p, "sha256": h})).collect::<Vec<_>>(),
                    "status": self.status,
                    "results": self.results,
                });
                if let Some(ms) = self.timing_ms {
                    v["timing_ms"] = json!(ms);
                }
                let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                let _ = writeln!(out, "{}: {}", self.command, self.status);
                for (p, h) in &self.inputs {
                    let _ = writeln!(out, "  input {p} sha256 {}", &h[..16]);
                }
                let width = self.results.keys().map(String::len).max().unwrap_or(0);
                for (k, v) in &self.results {
                    let _ = writeln!(out, "  {k:<width$}  {}", text_value(v));
                }
                if let Some(ms) = self.timing_ms {
                    let _ = writeln!(out, "  {:<width$}  {ms:.1} ms", "time");
                }
                out
            }
        }
    }
}

fn text_value(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) if xs.iter().all(|x| !x.is_array() && !x.is_object()) => {
            xs.iter().map(text_value).collect::<Vec<_>>().join(" ")
        }
        Value::Object(map) if map.values().all(|x| !x.is_array() && !x.is_object()) => map
            .iter()
            .map(|(k, x)| format!("{k}={}", text_value(x)))
            .collect::<Vec<_>>()
            .join(" "),
        other => other.to_string(),
    }
}
