//! Byte-stable JSON: sorted keys, floats rounded to 12 significant digits.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Round to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

fn canonicalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64 number"));
            // -0.0 and 0.0 print differently; reports should not.
            let x = if x == 0.0 { 0.0 } else { x };
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonicalize).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, canonicalize(v))).collect()),
        other => other,
    }
}

/// Canonical JSON value of `x` with a top-level `"schema": 1` for objects.
pub fn to_canonical(x: &impl Serialize) -> Result<Value> {
    let mut v = canonicalize(serde_json::to_value(x)?);
    if let Value::Object(m) = &mut v {
        m.entry("schema").or_insert(Value::from(crate::input::SCHEMA_VERSION));
    }
    Ok(v)
}

pub fn to_canonical_string(x: &impl Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_canonical(x)?)?;
    s.push('\n');
    Ok(s)
}

/// First difference between two reports, as a JSON pointer and message.
/// Numbers compare with relative tolerance `rel_tol`.
pub fn first_difference(expected: &Value, actual: &Value, rel_tol: f64) -> Option<(String, String)> {
    fn walk(e: &Value, a: &Value, rel_tol: f64, at: &mut String) -> Option<(String, String)> {
        match (e, a) {
            (Value::Number(x), Value::Number(y)) => {
                let (x, y) = (x.as_f64()?, y.as_f64()?);
                let scale = x.abs().max(y.abs()).max(1.0);
                ((x - y).abs() > rel_tol * scale).then(|| (at.clone(), format!("expected {x}, got {y}")))
            }
            (Value::Array(xs), Value::Array(ys)) => {
                if xs.len() != ys.len() {
                    return Some((at.clone(), format!("expected {} items, got {}", xs.len(), ys.len())));
                }
                for (i, (x, y)) in xs.iter().zip(ys).enumerate() {
                    let len = at.len();
                    at.push_str(&format!("/{i}"));
                    if let Some(d) = walk(x, y, rel_tol, at) {
                        return Some(d);
                    }
                    at.truncate(len);
                }
                None
            }
            (Value::Object(xs), Value::Object(ys)) => {
                for k in xs.keys().chain(ys.keys()) {
                    let len = at.len();
                    at.push('/');
                    at.push_str(k);
                    match (xs.get(k), ys.get(k)) {
                        (Some(x), Some(y)) => {
                            if let Some(d) = walk(x, y, rel_tol, at) {
                                return Some(d);
                            }
                        }
                        (Some(_), None) => return Some((at.clone(), "missing".into())),
                        (None, _) => return Some((at.clone(), "unexpected".into())),
                    }
                    at.truncate(len);
                }
                None
            }
            _ => (e != a).then(|| (at.clone(), format!("expected {e}, got {a}"))),
        }
    }
    walk(expected, actual, rel_tol, &mut String::new())
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-0.0), 0.0);
    }

    #[test]
    fn stable_text() {
        let v = json!({"b": 1.0000000000001, "a": [0.30000000000000004, 2]});
        let s = to_canonical_string(&v).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [\n    0.3,\n    2\n  ],\n  \"b\": 1.0,\n  \"schema\": 1\n}\n"
        );
    }

    #[test]
    fn differences() {
        let a = json!({"x": [1.0, 2.0], "y": "s"});
        assert_eq!(first_difference(&a, &a, 1e-9), None);
        let b = json!({"x": [1.0, 2.5], "y": "s"});
        assert_eq!(first_difference(&a, &b, 1e-9).unwrap().0, "/x/1");
        let c = json!({"x": [1.0, 2.0]});
        assert_eq!(first_difference(&a, &c, 1e-9).unwrap().0, "/y");
    }
}
