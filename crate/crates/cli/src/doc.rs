//! Verdict documents and their text and CSV renderings.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct VerdictDocument {
    pub schema: u32,
    pub command: String,
    /// `sha256:` of the input bytes.
    pub input_digest: String,
    pub decision: bool,
    pub payload: Value,
    pub residuals: BTreeMap<String, f64>,
    pub params: BTreeMap<String, Value>,
    pub version: String,
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{:x}", Sha256::digest(bytes))
}

impl VerdictDocument {
    pub fn new(command: &str, digest: String, decision: bool, payload: Value) -> Self {
        Self {
            schema: SCHEMA,
            command: command.to_string(),
            input_digest: digest,
            decision,
            payload,
            residuals: BTreeMap::new(),
            params: BTreeMap::new(),
            version: concat!("pseudounitary ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }

    pub fn residual(mut self, key: &str, v: f64) -> Self {
        self.residuals.insert(key.to_string(), v);
        self
    }

    pub fn param(mut self, key: &str, v: impl Serialize) -> Self {
        self.params.insert(key.to_string(), serde_json::to_value(v).expect("parameters serialize"));
        self
    }

    pub fn render(&self, format: Format) -> Vec<u8> {
        match format {
            Format::Text => {
                let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
                s.push('\n');
                s.into_bytes()
            }
            Format::Csv => render_csv(&serde_json::to_value(self).expect("documents serialize")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    /// Pretty-printed JSON.
    Text,
    /// `key,value` rows; a trajectory table follows after a blank line.
    Csv,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Text => "json",
            Format::Csv => "csv",
        }
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

fn render_csv(doc: &Value) -> Vec<u8> {
    let mut doc = doc.clone();
    let table = doc.get_mut("payload").and_then(|p| p.as_object_mut()).and_then(|p| p.remove("table"));
    let mut rows = Vec::new();
    flatten("", &doc, &mut rows);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["key", "value"]).expect("in-memory write");
    for (k, v) in &rows {
        w.write_record([k, v]).expect("in-memory write");
    }
    let mut out = w.into_inner().expect("in-memory write");
    if let Some(t) = table {
        out.push(b'\n');
        let mut w = csv::Writer::from_writer(Vec::new());
        if let Some(cols) = t.get("columns").and_then(|c| c.as_array()) {
            w.write_record(cols.iter().map(|c| c.as_str().unwrap_or_default().to_string())).expect("in-memory write");
        }
        for row in t.get("rows").and_then(|r| r.as_array()).into_iter().flatten() {
            let cells: Vec<String> = row.as_array().into_iter().flatten().map(|x| x.to_string()).collect();
            w.write_record(cells).expect("in-memory write");
        }
        out.extend(w.into_inner().expect("in-memory write"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_rendering() {
        let mut d = VerdictDocument::new("x", digest(b"abc"), true, json!({"a": [1, 2], "table": {"columns": ["t", "x"], "rows": [[0.0, 1.5]]}}));
        d = d.residual("r", 0.25).param("tol", 1e-9);
        let s = String::from_utf8(d.render(Format::Csv)).unwrap();
        assert!(s.starts_with("key,value\n"));
        assert!(s.contains("payload.a.1,2\n"));
        assert!(s.contains("residuals.r,0.25\n"));
        assert!(s.ends_with("\nt,x\n0.0,1.5\n"));
        assert!(s.contains("input_digest,sha256:ba7816bf"));
    }
}
