use serde_json::Value;

/// Leaves of a JSON document as `(dotted.path, value)` pairs, in document order.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    walk(value, String::new(), &mut out);
    out
}

fn walk(value: &Value, path: String, out: &mut Vec<(String, String)>) {
    let join = |key: &str| {
        if path.is_empty() {
            key.to_string()
        } else {
            format!("{path}.{key}")
        }
    };
    match value {
        Value::Object(map) => map.iter().for_each(|(k, v)| walk(v, join(k), out)),
        Value::Array(items) => items
            .iter()
            .enumerate()
            .for_each(|(i, v)| walk(v, join(&i.to_string()), out)),
        Value::String(s) => out.push((path, s.clone())),
        Value::Null => out.push((path, String::new())),
        other => out.push((path, other.to_string())),
    }
}

pub fn table(value: &Value) -> String {
    let rows = flatten(value);
    let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$}  {v}\n"))
        .collect()
}

pub fn csv(value: &Value) -> String {
    let mut s = String::from("key,value\n");
    for (k, v) in flatten(value) {
        let v = if v.contains([',', '"', '\n']) {
            format!("\"{}\"", v.replace('"', "\"\""))
        } else {
            v
        };
        s.push_str(&format!("{k},{v}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_nested_values() {
        let v = json!({"a": 1, "b": {"c": [2.5, "inf"]}, "d": null});
        assert_eq!(
            flatten(&v),
            vec![
                ("a".into(), "1".into()),
                ("b.c.0".into(), "2.5".into()),
                ("b.c.1".into(), "inf".into()),
                ("d".into(), String::new()),
            ]
        );
        assert_eq!(csv(&json!({"x": "a,b"})), "key,value\nx,\"a,b\"\n");
    }
}
