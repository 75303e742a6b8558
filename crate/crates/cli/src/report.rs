//! Report envelope and output formats.
//!
//! Every invocation produces one report.  The JSON form is deterministic:
//! objects are serialized with sorted keys (the default `serde_json`
//! map), coefficients appear as exact `p/q` strings inside canonical
//! element text, and the only run-dependent field is the top-level
//! `timingMicros`, which comparison tooling is expected to strip (it
//! always sits on its own line and is never the last key).  The text form
//! is a fixed-order indented rendering of the same tree.

use serde_json::{Map, Value};
use workbench_core::element::element_string;
use workbench_core::{Element, Generators, Monomial, Q};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

/// A finished invocation: the report tree plus the process exit code.
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

/// Assemble the common envelope around a verb-specific result.
pub fn envelope(verb: &str, status: &str, inputs: Value, result: Value) -> Value {
    let mut map = Map::new();
    map.insert("schemaVersion".into(), Value::from(SCHEMA_VERSION));
    map.insert("verb".into(), Value::from(verb));
    map.insert("status".into(), Value::from(status));
    map.insert("inputs".into(), inputs);
    map.insert("result".into(), result);
    Value::Object(map)
}

/// The error report emitted when an invocation fails outright.
pub fn error_report(verb: Option<&str>, code: &str, message: &str) -> Value {
    let mut map = Map::new();
    map.insert("schemaVersion".into(), Value::from(SCHEMA_VERSION));
    map.insert(
        "verb".into(),
        verb.map(Value::from).unwrap_or(Value::Null),
    );
    map.insert("status".into(), Value::from("error"));
    let mut err = Map::new();
    err.insert("code".into(), Value::from(code));
    err.insert("message".into(), Value::from(message));
    map.insert("error".into(), Value::Object(err));
    Value::Object(map)
}

/// Insert the timing field (the one run-dependent key).
pub fn with_timing(mut report: Value, micros: u128) -> Value {
    if let Value::Object(map) = &mut report {
        map.insert("timingMicros".into(), Value::from(micros as u64));
    }
    report
}

/// Canonical string for an element, shared by every payload.
pub fn elem(g: &Generators, e: &Element) -> Value {
    Value::from(element_string(g, e))
}

/// Canonical string for a linear functional given by monomial/coefficient
/// pairs over a fixed basis.
pub fn functional_string(g: &Generators, functional: &[(Monomial, Q)]) -> String {
    let mut e = Element::zero();
    for (m, c) in functional {
        e.add_term(m.clone(), c.clone());
    }
    element_string(g, &e)
}

pub fn render(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("serializable report");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut out = String::new();
            render_text(report, 0, &mut out);
            out
        }
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                if let Some(s) = scalar_text(val) {
                    out.push_str(&format!("{pad}{k}: {s}\n"));
                } else if matches!(val, Value::Array(a) if a.is_empty()) {
                    out.push_str(&format!("{pad}{k}: []\n"));
                } else if matches!(val, Value::Object(o) if o.is_empty()) {
                    out.push_str(&format!("{pad}{k}: {{}}\n"));
                } else {
                    out.push_str(&format!("{pad}{k}:\n"));
                    render_text(val, indent + 1, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if let Some(s) = scalar_text(item) {
                    out.push_str(&format!("{pad}- {s}\n"));
                } else {
                    out.push_str(&format!("{pad}-\n"));
                    render_text(item, indent + 1, out);
                }
            }
        }
        other => {
            let s = scalar_text(other).unwrap_or_default();
            out.push_str(&format!("{pad}{s}\n"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_keys_are_sorted_and_stable() {
        let r = envelope("mc-check", "ok", json!({"b": 1, "a": 2}), json!({"z": [1, 2]}));
        let s = render(&r, Format::Json);
        let a = s.find("\"a\"").unwrap();
        let b = s.find("\"b\"").unwrap();
        assert!(a < b, "keys must serialize sorted");
        assert_eq!(s, render(&r, Format::Json), "rendering must be deterministic");
        assert!(s.ends_with('\n'));
    }

    #[test]
    fn timing_strips_cleanly() {
        let r = envelope("bracket", "ok", json!({}), json!({"value": "0"}));
        let bare = render(&r, Format::Json);
        let timed = render(&with_timing(r, 12345), Format::Json);
        let stripped: String = timed
            .lines()
            .filter(|l| !l.trim_start().starts_with("\"timingMicros\""))
            .map(|l| format!("{l}\n"))
            .collect();
        assert_eq!(stripped, bare, "removing the timing line must recover the bare report");
    }

    #[test]
    fn text_rendering_is_structured() {
        let r = envelope(
            "nondeg",
            "ok",
            json!({"truncation": 4}),
            json!({"outcome": "invertible", "rows": ["pv_x", "pv_y"]}),
        );
        let t = render(&r, Format::Text);
        assert!(t.contains("verb: nondeg\n"));
        assert!(t.contains("  truncation: 4\n"));
        assert!(t.contains("  - pv_x\n"));
    }
}
