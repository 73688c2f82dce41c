//! Run summaries conform to the schema shipped in `schemas/`.
//!
//! The checker covers the keywords the schema uses: `type` (string or list),
//! `enum`, `minimum`, `required`, `properties`, and `additionalProperties`.

use gpr::harness::{run_solve, ExperimentKind, ExperimentSpec};
use gpr::solver::Algo;
use serde_json::Value;

fn type_matches(name: &str, v: &Value) -> bool {
    match name {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "null" => v.is_null(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        other => panic!("unsupported type keyword {other}"),
    }
}

fn validate(schema: &Value, v: &Value, at: &str, errors: &mut Vec<String>) {
    let s = schema.as_object().expect("schema object");
    if let Some(t) = s.get("type") {
        let names: Vec<&str> = match t {
            Value::String(x) => vec![x.as_str()],
            Value::Array(xs) => xs.iter().map(|x| x.as_str().unwrap()).collect(),
            _ => panic!("bad type keyword"),
        };
        if !names.iter().any(|n| type_matches(n, v)) {
            errors.push(format!("{at}: expected {names:?}, got {v}"));
            return;
        }
    }
    if let Some(Value::Array(options)) = s.get("enum") {
        if !options.contains(v) {
            errors.push(format!("{at}: {v} not in {options:?}"));
        }
    }
    if let (Some(min), Some(x)) = (s.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if x < min {
            errors.push(format!("{at}: {x} < {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = s.get("properties").and_then(Value::as_object);
        for req in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(req.as_str().unwrap()) {
                errors.push(format!("{at}: missing {req}"));
            }
        }
        for (k, val) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(sub) => validate(sub, val, &format!("{at}/{k}"), errors),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errors.push(format!("{at}: unexpected key {k}"))
                }
                None => {}
            }
        }
    }
}

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schemas/run_summary.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn summaries_validate_for_every_algorithm() {
    let schema = schema();
    for algo in [Algo::TrmAdaptive, Algo::TrmFixed, Algo::Gd] {
        let spec = ExperimentSpec {
            n: 6,
            algo,
            max_iters: Some(50),
            ..ExperimentSpec::defaults(ExperimentKind::Solve)
        };
        let report = run_solve(&spec).unwrap();
        let value = serde_json::to_value(&report.summary).unwrap();
        let mut errors = Vec::new();
        validate(&schema, &value, "", &mut errors);
        assert!(errors.is_empty(), "{algo}: {errors:?}");
    }
}

#[test]
fn checker_rejects_malformed_summaries() {
    let schema = schema();
    let spec = ExperimentSpec { n: 4, ..ExperimentSpec::defaults(ExperimentKind::Solve) };
    let good = serde_json::to_value(run_solve(&spec).unwrap().summary).unwrap();
    for (key, bad) in [("status", Value::from("stuck")), ("iterations", Value::from(-1)), ("extra", Value::from(1))] {
        let mut v = good.clone();
        v[key] = bad;
        let mut errors = Vec::new();
        validate(&schema, &v, "", &mut errors);
        assert!(!errors.is_empty(), "{key}");
    }
    let mut v = good;
    v.as_object_mut().unwrap().remove("seed");
    let mut errors = Vec::new();
    validate(&schema, &v, "", &mut errors);
    assert!(!errors.is_empty());
}
