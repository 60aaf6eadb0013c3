//! Layered configuration: built-in defaults, then a JSON file, then flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::InputError;

/// Flag values that were given on the command line, keyed like the config.
pub type Overrides = Vec<(&'static str, Value)>;

pub fn push<T: Serialize>(out: &mut Overrides, key: &'static str, value: Option<T>) {
    if let Some(v) = value {
        out.push((key, serde_json::to_value(v).expect("flag values serialize")));
    }
}

fn read_file(path: &Path) -> Result<Map<String, Value>, InputError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| InputError::new(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str::<Value>(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(InputError::new(format!("config {} must be a JSON object", path.display()))),
        Err(e) => Err(InputError::new(format!("config {} is not valid JSON: {e}", path.display()))),
    }
}

/// Merges `defaults <- file <- flags` and deserializes the result. Keys
/// unknown to `C` are rejected.
pub fn resolve<C>(defaults: &C, file: Option<&Path>, flags: Overrides) -> Result<C, InputError>
where
    C: Serialize + DeserializeOwned,
{
    let Value::Object(mut merged) = serde_json::to_value(defaults).expect("defaults serialize") else {
        unreachable!("configs are structs");
    };
    let known: Vec<String> = merged.keys().cloned().collect();
    if let Some(path) = file {
        for (key, value) in read_file(path)? {
            if !known.contains(&key) {
                return Err(InputError::new(format!(
                    "unknown key \"{key}\" in {}; expected one of: {}",
                    path.display(),
                    known.join(", ")
                )));
            }
            merged.insert(key, value);
        }
    }
    for (key, value) in flags {
        merged.insert(key.to_string(), value);
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| InputError::new(format!("invalid configuration: {e}")))
}

/// Splits a comma list; a JSON array of strings or numbers is accepted too.
pub fn list_from_value(value: &Value) -> Option<Vec<String>> {
    match value {
        Value::String(s) => Some(s.split(',').map(|p| p.trim().to_string()).collect()),
        Value::Array(items) => items
            .iter()
            .map(|v| match v {
                Value::String(s) => Some(s.trim().to_string()),
                Value::Number(n) => Some(n.to_string()),
                _ => None,
            })
            .collect(),
        _ => None,
    }
}

/// Serde adapter for optional number lists written as `"a,b"` or `[a, b]`.
pub mod number_list {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &Option<Vec<String>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(items) => s.collect_seq(items),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<String>>, D::Error> {
        match Value::deserialize(d)? {
            Value::Null => Ok(None),
            v => super::list_from_value(&v)
                .map(Some)
                .ok_or_else(|| D::Error::custom("expected a comma-separated string or an array of numbers")),
        }
    }
}
