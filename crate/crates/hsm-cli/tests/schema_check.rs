//! The shipped JSON schemas must describe exactly what the binary emits.
//!
//! A small structural validator covers the subset of JSON Schema the
//! shipped files use: type (single or list), required, properties,
//! additionalProperties: false, items, enum, and minimum. Reports from
//! real binary runs are validated against the schema files.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::Command;

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load_schema(name: &str) -> Value {
    let path = schema_dir().join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("parsing {name}: {e}"))
}

fn type_name(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(n) => {
            if n.is_u64() || n.is_i64() {
                "integer"
            } else {
                "number"
            }
        }
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

fn type_matches(expected: &str, value: &Value) -> bool {
    match expected {
        // Every integer is a number.
        "number" => matches!(value, Value::Number(_)),
        other => type_name(value) == other,
    }
}

/// Collects every violation of `schema` by `value` into `errors`, with
/// JSON-pointer-style paths.
fn check(schema: &Value, value: &Value, path: &str, errors: &mut Vec<String>) {
    if let Some(types) = schema.get("type") {
        let allowed: Vec<&str> = match types {
            Value::String(s) => vec![s.as_str()],
            Value::Array(list) => list.iter().filter_map(|t| t.as_str()).collect(),
            _ => vec![],
        };
        if !allowed.iter().any(|t| type_matches(t, value)) {
            errors.push(format!(
                "{path}: expected {}, got {}",
                allowed.join(" or "),
                type_name(value)
            ));
            return;
        }
    }
    if let Some(options) = schema.get("enum").and_then(Value::as_array) {
        if !options.contains(value) {
            errors.push(format!("{path}: {value} not in {options:?}"));
        }
    }
    if let Some(minimum) = schema.get("minimum").and_then(Value::as_f64) {
        if let Some(x) = value.as_f64() {
            if x < minimum {
                errors.push(format!("{path}: {x} below minimum {minimum}"));
            }
        }
    }
    if let Value::Object(fields) = value {
        if let Some(required) = schema.get("required").and_then(Value::as_array) {
            for name in required.iter().filter_map(|r| r.as_str()) {
                if !fields.contains_key(name) {
                    errors.push(format!("{path}: missing required field {name}"));
                }
            }
        }
        let properties = schema.get("properties").and_then(Value::as_object);
        if schema.get("additionalProperties") == Some(&Value::Bool(false)) {
            for key in fields.keys() {
                if properties.is_none_or(|p| !p.contains_key(key)) {
                    errors.push(format!("{path}: unexpected field {key}"));
                }
            }
        }
        if let Some(properties) = properties {
            for (key, sub) in properties {
                if let Some(child) = fields.get(key) {
                    check(sub, child, &format!("{path}/{key}"), errors);
                }
            }
        }
    }
    if let (Value::Array(items), Some(item_schema)) = (value, schema.get("items")) {
        for (i, child) in items.iter().enumerate() {
            check(item_schema, child, &format!("{path}/{i}"), errors);
        }
    }
}

fn assert_valid(schema: &Value, value: &Value, what: &str) {
    let mut errors = Vec::new();
    check(schema, value, "", &mut errors);
    assert!(errors.is_empty(), "{what} violates its schema:\n{}", errors.join("\n"));
}

fn run_json(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_hsm"))
        .args(args)
        .env_remove("HSM_THREADS")
        .output()
        .expect("spawn hsm");
    assert!(
        out.status.success(),
        "hsm {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout must be JSON")
}

#[test]
fn shipped_schemas_parse_and_the_validator_rejects_bad_documents() {
    for name in [
        "instance.schema.json",
        "hs-instance.schema.json",
        "estimate-report.schema.json",
        "verify-report.schema.json",
    ] {
        let schema = load_schema(name);
        assert_eq!(schema["type"].as_str(), Some("object"), "{name}");
    }

    // The validator itself must catch type, required, extra-field, enum,
    // and minimum violations; otherwise the passing tests prove nothing.
    let schema = load_schema("verify-report.schema.json");
    let mut errors = Vec::new();
    check(
        &schema,
        &serde_json::json!({"suite": "all", "seed": -1, "ok": "yes", "extra": 1}),
        "",
        &mut errors,
    );
    let text = errors.join("\n");
    assert!(text.contains("missing required field checks"), "{text}");
    assert!(text.contains("unexpected field extra"), "{text}");
    assert!(text.contains("/ok: expected boolean"), "{text}");
    assert!(text.contains("below minimum"), "{text}");

    let mut errors = Vec::new();
    check(
        &schema,
        &serde_json::json!({"suite": "nope", "seed": 0, "ok": true, "checks": []}),
        "",
        &mut errors,
    );
    assert!(errors.join("\n").contains("not in"), "{errors:?}");
}

#[test]
fn example_instances_validate_against_the_input_schemas() {
    let instance = load_schema("instance.schema.json");
    for doc in [
        serde_json::json!({"vertices": 3, "edges": [[0,1],[1,2]], "lambda": 1.0}),
        serde_json::json!({"adjacency": [[0,1],[1,0]], "lambda": [0.5, 2.0]}),
        serde_json::json!({"vertices": 0, "lambda": 1.0}),
    ] {
        assert_valid(&instance, &doc, "example instance");
    }
    let hs = load_schema("hs-instance.schema.json");
    for doc in [
        serde_json::json!({"d": 1, "ell": 4.0, "lambda": 1.0}),
        serde_json::json!({"d": 2, "ell": 2.0, "lambda": 0.3, "rho": 4.0}),
    ] {
        assert_valid(&hs, &doc, "example hard-sphere instance");
    }
}

#[test]
fn estimate_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("free3.json");
    std::fs::write(&inst, r#"{"vertices": 3, "lambda": 1.0}"#).unwrap();
    let report = run_json(&[
        "estimate",
        "--instance",
        inst.to_str().unwrap(),
        "--epsilon",
        "0.25",
        "--seed",
        "3",
    ]);
    let schema = load_schema("estimate-report.schema.json");
    assert_valid(&schema, &report, "estimate report");
    assert!(report.get("discretization").is_none());
}

#[test]
fn hard_sphere_reports_validate() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("rods.json");
    std::fs::write(&inst, r#"{"d": 1, "ell": 2.0, "lambda": 0.5}"#).unwrap();
    let report = run_json(&[
        "hs-estimate",
        "--instance",
        inst.to_str().unwrap(),
        "--epsilon",
        "0.9",
        "--seed",
        "1",
    ]);
    let schema = load_schema("estimate-report.schema.json");
    assert_valid(&schema, &report, "hard-sphere report");
    assert!(report.get("discretization").is_some());
    assert!(report.get("regime_flags").is_some());
}

#[test]
fn verify_reports_validate() {
    let schema = load_schema("verify-report.schema.json");
    for suite in ["stationarity", "influence", "saw", "complex", "bounds"] {
        let report = run_json(&["verify", "--suite", suite, "--format", "json"]);
        assert_valid(&schema, &report, &format!("verify report for {suite}"));
    }
}
