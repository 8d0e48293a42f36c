//! In-memory JSON tree used for request bodies, response bodies and pooled
//! resources.
//!
//! Unlike `serde_json::Value` this tree has a dedicated [`JsonValue::Generated`]
//! variant marking properties the server is expected to assign (database
//! generated identifiers and counters). Generated properties are dropped when
//! the value is serialized for the wire and are ignored by
//! [`JsonValue::eq_masked`].

use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;

pub type JsonObject = IndexMap<String, JsonValue>;

#[derive(Debug, Clone, PartialEq)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
    Array(Vec<JsonValue>),
    Object(JsonObject),
    /// Placeholder for a server-assigned property.
    Generated,
}

impl JsonValue {
    pub fn object() -> Self {
        JsonValue::Object(JsonObject::new())
    }

    pub fn as_object(&self) -> Option<&JsonObject> {
        match self {
            JsonValue::Object(map) => Some(map),
            _ => None,
        }
    }

    pub fn as_object_mut(&mut self) -> Option<&mut JsonObject> {
        match self {
            JsonValue::Object(map) => Some(map),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[JsonValue]> {
        match self {
            JsonValue::Array(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::Str(s) => Some(s),
            _ => None,
        }
    }

    /// Numeric view of `Int` and `Float`.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            JsonValue::Int(i) => Some(*i as f64),
            JsonValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn is_generated(&self) -> bool {
        matches!(self, JsonValue::Generated)
    }

    pub fn get(&self, key: &str) -> Option<&JsonValue> {
        self.as_object().and_then(|map| map.get(key))
    }

    /// Kind name used in diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            JsonValue::Null => "null",
            JsonValue::Bool(_) => "boolean",
            JsonValue::Int(_) => "integer",
            JsonValue::Float(_) => "number",
            JsonValue::Str(_) => "string",
            JsonValue::Array(_) => "array",
            JsonValue::Object(_) => "object",
            JsonValue::Generated => "generated",
        }
    }

    /// Renders a scalar as it would appear inside a URL segment.
    pub fn to_url_text(&self) -> Option<String> {
        match self {
            JsonValue::Str(s) => Some(s.clone()),
            JsonValue::Int(i) => Some(i.to_string()),
            JsonValue::Float(f) => Some(f.to_string()),
            JsonValue::Bool(b) => Some(b.to_string()),
            _ => None,
        }
    }

    /// Structural equality that ignores object members whose key is in `mask`
    /// or whose value on either side is [`JsonValue::Generated`]. Integers and
    /// floats compare numerically.
    pub fn eq_masked(&self, other: &JsonValue, mask: &HashSet<String>) -> bool {
        use JsonValue::*;
        match (self, other) {
            (Object(a), Object(b)) => {
                let keys = a.keys().chain(b.keys().filter(|k| !a.contains_key(*k)));
                for key in keys {
                    if mask.contains(key) {
                        continue;
                    }
                    match (a.get(key), b.get(key)) {
                        (Some(Generated), _) | (_, Some(Generated)) => {}
                        (Some(x), Some(y)) if x.eq_masked(y, mask) => {}
                        _ => return false,
                    }
                }
                true
            }
            (Array(a), Array(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.eq_masked(y, mask))
            }
            (Int(_) | Float(_), Int(_) | Float(_)) => self.as_f64() == other.as_f64(),
            (Generated, Generated) => true,
            _ => self == other,
        }
    }

    /// Converts to the wire representation, dropping generated members.
    pub fn to_wire(&self) -> serde_json::Value {
        use serde_json::Value;
        match self {
            JsonValue::Null | JsonValue::Generated => Value::Null,
            JsonValue::Bool(b) => Value::Bool(*b),
            JsonValue::Int(i) => Value::from(*i),
            JsonValue::Float(f) => serde_json::Number::from_f64(*f).map_or(Value::Null, Value::Number),
            JsonValue::Str(s) => Value::String(s.clone()),
            JsonValue::Array(items) => Value::Array(items.iter().map(JsonValue::to_wire).collect()),
            JsonValue::Object(map) => Value::Object(
                map.iter()
                    .filter(|(_, v)| !v.is_generated())
                    .map(|(k, v)| (k.clone(), v.to_wire()))
                    .collect(),
            ),
        }
    }

    pub fn to_json_string(&self) -> String {
        self.to_wire().to_string()
    }

    pub fn to_pretty_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_wire()).unwrap_or_default()
    }
}

impl From<&serde_json::Value> for JsonValue {
    fn from(value: &serde_json::Value) -> Self {
        use serde_json::Value;
        match value {
            Value::Null => JsonValue::Null,
            Value::Bool(b) => JsonValue::Bool(*b),
            Value::Number(n) => match n.as_i64() {
                Some(i) => JsonValue::Int(i),
                None => JsonValue::Float(n.as_f64().unwrap_or(f64::NAN)),
            },
            Value::String(s) => JsonValue::Str(s.clone()),
            Value::Array(items) => JsonValue::Array(items.iter().map(JsonValue::from).collect()),
            Value::Object(map) => {
                JsonValue::Object(map.iter().map(|(k, v)| (k.clone(), JsonValue::from(v))).collect())
            }
        }
    }
}

impl From<serde_json::Value> for JsonValue {
    fn from(value: serde_json::Value) -> Self {
        JsonValue::from(&value)
    }
}

impl fmt::Display for JsonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json_string())
    }
}
