//! Instance documents: a flat JSON object with keys
//! `n, a0, b0, c0, a1, b1, c1, a2, b2, c2, h`.
//!
//! `b0` and `h` are arrays of `n` numbers; plain numbers are accepted when
//! `n = 1`. `n` may be omitted, in which case it is taken from `b0`.

use std::path::Path;

use octic::{Coefficients, ProblemSpec};
use serde_json::{Map, Value};

const SCALAR_KEYS: [&str; 8] = ["a0", "c0", "a1", "b1", "c1", "a2", "b2", "c2"];
const KNOWN_KEYS: [&str; 11] = [
    "n", "a0", "b0", "c0", "a1", "b1", "c1", "a2", "b2", "c2", "h",
];

/// Reads and validates an instance file. Errors are human-readable and name
/// the offending field (and its line, when it appears in the text).
pub fn load(path: &Path) -> Result<ProblemSpec, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn parse(text: &str) -> Result<ProblemSpec, String> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    let Value::Object(obj) = value else {
        return Err("instance must be a JSON object".into());
    };
    let field_err = |key: &str, msg: String| match line_of(text, key) {
        Some(line) => format!("line {line}: field `{key}`: {msg}"),
        None => format!("field `{key}`: {msg}"),
    };

    if let Some(k) = obj.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(field_err(k, "unknown key".into()));
    }

    let n = match obj.get("n") {
        None => None,
        Some(v) => match v.as_u64() {
            Some(n) if n >= 1 => Some(n as usize),
            _ => {
                return Err(field_err(
                    "n",
                    format!("expected a positive integer, got {v}"),
                ))
            }
        },
    };

    let mut scalars = [0.0; 8];
    for (slot, key) in scalars.iter_mut().zip(SCALAR_KEYS) {
        *slot = number(&obj, key).map_err(|m| field_err(key, m))?;
    }
    let b0 = vector(&obj, "b0", n).map_err(|m| field_err("b0", m))?;
    let n = n.unwrap_or(b0.len());
    let h = vector(&obj, "h", Some(n)).map_err(|m| field_err("h", m))?;
    let [a0, c0, a1, b1, c1, a2, b2, c2] = scalars;
    let c = Coefficients {
        a0,
        b0,
        c0,
        a1,
        b1,
        c1,
        a2,
        b2,
        c2,
        h,
    };
    ProblemSpec::new(c).map_err(|e| e.to_string())
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<f64, String> {
    match obj.get(key) {
        None => Err("missing".into()),
        Some(v) => v
            .as_f64()
            .ok_or_else(|| format!("expected a number, got {v}")),
    }
}

fn vector(obj: &Map<String, Value>, key: &str, n: Option<usize>) -> Result<Vec<f64>, String> {
    let v = obj.get(key).ok_or("missing")?;
    let out = match v {
        Value::Number(x) => vec![x.as_f64().ok_or("not representable as f64")?],
        Value::Array(items) => items
            .iter()
            .enumerate()
            .map(|(i, x)| {
                x.as_f64()
                    .ok_or_else(|| format!("entry {i}: expected a number, got {x}"))
            })
            .collect::<Result<_, _>>()?,
        other => {
            return Err(format!(
                "expected a number or an array of numbers, got {other}"
            ))
        }
    };
    match n {
        Some(n) if out.len() != n => Err(format!("expected {n} entries, got {}", out.len())),
        _ if out.is_empty() => Err("must not be empty".into()),
        _ => Ok(out),
    }
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    let needle = format!("\"{key}\"");
    text.lines()
        .position(|l| l.contains(&needle))
        .map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WORKED: &str = r#"{
  "n": 1,
  "a0": 1, "b0": 3, "c0": -1.5,
  "a1": 1, "b1": 2, "c1": -1,
  "a2": 1, "b2": 1, "c2": -5,
  "h": 2
}"#;

    #[test]
    fn scalars_accepted_for_one_dimension() {
        let s = parse(WORKED).unwrap();
        assert_eq!(s.dim(), 1);
        assert_eq!(s.h(), &[2.0]);
    }

    #[test]
    fn missing_field_is_named() {
        let text = WORKED.replace(r#""a2": 1, "#, "");
        let err = parse(&text).unwrap_err();
        assert!(err.contains("`a2`") && err.contains("missing"), "{err}");
    }

    #[test]
    fn length_mismatch_reports_line() {
        let text = WORKED.replace(r#""n": 1"#, r#""n": 2"#);
        let err = parse(&text).unwrap_err();
        assert_eq!(err, "line 3: field `b0`: expected 2 entries, got 1");
    }

    #[test]
    fn positivity_enforced() {
        let text = WORKED.replace(r#""a1": 1"#, r#""a1": -1"#);
        assert!(parse(&text).unwrap_err().contains("a1"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert!(parse("{\n  \"a0\": ,\n}")
            .unwrap_err()
            .starts_with("line 2"));
    }

    #[test]
    fn unknown_key_rejected() {
        let text = WORKED.replace(r#""h": 2"#, r#""h": 2, "d": 1"#);
        assert!(parse(&text).unwrap_err().contains("unknown key"));
    }
}
