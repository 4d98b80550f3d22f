//! JSON, text and CSV renderings of the reports.

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::commands::CliError;
use crate::report::{AnalysisReport, IdentitySummary, ParseReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

fn json<S: Serialize>(v: &S) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports are always serializable");
    s.push('\n');
    s
}

/// Leaves of `v` as `(dotted.path, scalar)` in document order.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&key(k), x, out)),
        Value::Array(a) if a.iter().all(|x| !x.is_object()) => {
            out.push((prefix.to_string(), a.iter().map(scalar).collect::<Vec<_>>().join(" ")));
        }
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&key(&i.to_string()), x, out)),
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => format!("[{}]", a.iter().map(scalar).collect::<Vec<_>>().join(" ")),
        other => other.to_string(),
    }
}

fn leaves<S: Serialize>(v: &S) -> Vec<(String, String)> {
    // Round-trip through text so the 17-digit raw numbers parse as ordinary values.
    let value: Value = serde_json::from_str(&serde_json::to_string(v).expect("serializable")).expect("valid json");
    let mut out = Vec::new();
    flatten("", &value, &mut out);
    out
}

fn text<S: Serialize>(v: &S) -> String {
    leaves(v).into_iter().map(|(k, x)| format!("{k}: {x}\n")).collect()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One header row and one value row.
fn csv<S: Serialize>(v: &S) -> String {
    let l = leaves(v);
    let header: Vec<String> = l.iter().map(|(k, _)| csv_field(k)).collect();
    let row: Vec<String> = l.iter().map(|(_, x)| csv_field(x)).collect();
    format!("{}\n{}\n", header.join(","), row.join(","))
}

fn render<S: Serialize>(v: &S, f: Format) -> String {
    match f {
        Format::Json => json(v),
        Format::Text => text(v),
        Format::Csv => csv(v),
    }
}

pub fn render_analysis(r: &AnalysisReport, f: Format) -> String {
    render(r, f)
}

pub fn render_parse(r: &ParseReport, f: Format) -> String {
    render(r, f)
}

pub fn render_identities(r: &IdentitySummary, f: Format) -> String {
    render(r, f)
}

/// `{"error": {...}}` on one line.
pub fn render_error(e: &CliError) -> String {
    let mut s = serde_json::to_string(&serde_json::json!({ "error": e })).expect("serializable");
    s.push('\n');
    s
}
