//! Structural check for metrics reports.

use serde_json::{Map, Value};

const FRACTIONS: [&str; 4] = ["consistency", "collision_degree", "error_rate", "avg_correlation"];
const COUNTS: [&str; 3] = ["unique_tokens", "unique_hashes", "colliding_hashes"];
const TOLERANCE: f64 = 1e-12;

fn fraction(obj: &Map<String, Value>, key: &str, nullable: bool, errs: &mut Vec<String>) -> Option<f64> {
    match obj.get(key) {
        None => errs.push(format!("missing field {key:?}")),
        Some(Value::Null) if nullable => {}
        Some(v) => match v.as_f64() {
            Some(x) if (-TOLERANCE..=1.0 + TOLERANCE).contains(&x) => return Some(x),
            _ => errs.push(format!(
                "{key:?} must be a number in [0, 1]{}, got {v}",
                if nullable { " or null" } else { "" }
            )),
        },
    }
    None
}

/// Check a report object: exactly the expected fields, fractions in [0, 1]
/// or null, non-negative integer counts, and
/// `error_rate = 1 − (α·C + (1−α)·G)` when all three are present.
pub fn check_report(value: &Value) -> Result<(), Vec<String>> {
    let mut errs = Vec::new();
    let Some(obj) = value.as_object() else {
        return Err(vec!["report must be a JSON object".into()]);
    };
    let known = ["info_loss", "alpha", "counts"];
    for key in obj.keys() {
        if !known.contains(&key.as_str()) && !FRACTIONS.contains(&key.as_str()) {
            errs.push(format!("unexpected field {key:?}"));
        }
    }
    match obj.get("info_loss") {
        Some(v) if v.as_f64().is_some_and(f64::is_finite) => {}
        Some(v) => errs.push(format!("\"info_loss\" must be a finite number, got {v}")),
        None => errs.push("missing field \"info_loss\"".into()),
    }
    let alpha = fraction(obj, "alpha", false, &mut errs);
    let values: Vec<Option<f64>> = FRACTIONS.iter().map(|k| fraction(obj, k, true, &mut errs)).collect();

    match obj.get("counts").and_then(Value::as_object) {
        None => errs.push("\"counts\" must be an object".into()),
        Some(counts) => {
            for key in counts.keys() {
                if !COUNTS.contains(&key.as_str()) {
                    errs.push(format!("unexpected field \"counts.{key}\""));
                }
            }
            for key in COUNTS {
                if !counts.get(key).is_some_and(Value::is_u64) {
                    errs.push(format!("\"counts.{key}\" must be a non-negative integer"));
                }
            }
        }
    }

    if let (Some(a), Some(c), Some(g), Some(e)) = (alpha, values[0], values[1], values[2]) {
        let expected = 1.0 - (a * c + (1.0 - a) * g);
        if (expected - e).abs() > TOLERANCE {
            errs.push(format!(
                "error_rate {e} disagrees with 1 - (alpha*C + (1-alpha)*G) = {expected}"
            ));
        }
    }
    if errs.is_empty() {
        Ok(())
    } else {
        Err(errs)
    }
}
