//! Dotted-path configuration overrides (`--override policy.beta=0.05`).

use serde_json::Value;

/// Splits `key=value` into the path and the raw value text.
pub fn parse(entry: &str) -> Result<(&str, &str), String> {
    entry
        .split_once('=')
        .ok_or_else(|| format!("override `{entry}` must have the form key=value"))
}

/// Sets `path` (dot-separated, numeric segments index arrays) to the
/// JSON-parsed `raw` value, creating intermediate objects as needed.
pub fn apply(root: &mut Value, path: &str, raw: &str) -> Result<(), String> {
    let mut cursor = root;
    let segments: Vec<&str> = path.split('.').collect();
    for (i, segment) in segments.iter().enumerate() {
        let last = i + 1 == segments.len();
        if let Ok(index) = segment.parse::<usize>() {
            let arr = cursor
                .as_array_mut()
                .ok_or_else(|| format!("`{path}`: segment `{segment}` indexes a non-array"))?;
            if index >= arr.len() {
                return Err(format!(
                    "`{path}`: index {index} out of bounds ({})",
                    arr.len()
                ));
            }
            if last {
                arr[index] = parse_value(raw);
                return Ok(());
            }
            cursor = &mut arr[index];
        } else {
            let obj = cursor
                .as_object_mut()
                .ok_or_else(|| format!("`{path}`: segment `{segment}` enters a non-object"))?;
            if last {
                obj.insert((*segment).to_string(), parse_value(raw));
                return Ok(());
            }
            cursor = obj
                .entry((*segment).to_string())
                .or_insert_with(|| Value::Object(Default::default()));
        }
    }
    Ok(())
}

/// Raw text becomes JSON when it parses as JSON, a plain string
/// otherwise.
fn parse_value(raw: &str) -> Value {
    serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn sets_nested_numeric_value() {
        let mut v = json!({"policy": {"type": "ucb", "beta": 0.01}});
        apply(&mut v, "policy.beta", "0.05").unwrap();
        assert_eq!(v["policy"]["beta"], json!(0.05));
    }

    #[test]
    fn indexes_arrays() {
        let mut v = json!({"drafters": [{"id": 0}, {"id": 1}]});
        apply(&mut v, "drafters.1.id", "7").unwrap();
        assert_eq!(v["drafters"][1]["id"], json!(7));
    }

    #[test]
    fn strings_pass_through() {
        let mut v = json!({});
        apply(&mut v, "reward", "be").unwrap();
        assert_eq!(v["reward"], json!("be"));
    }

    #[test]
    fn bad_index_is_reported() {
        let mut v = json!({"drafters": []});
        assert!(apply(&mut v, "drafters.3.id", "1").is_err());
    }

    #[test]
    fn missing_equals_is_reported() {
        assert!(parse("policy.beta").is_err());
        assert_eq!(parse("a=b").unwrap(), ("a", "b"));
    }
}
