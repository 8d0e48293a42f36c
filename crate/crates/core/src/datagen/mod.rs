//! Test data generation for request bodies and URL parameters.

pub mod regex;

use rand::Rng;
use thiserror::Error;

use crate::apostl::Method;
use crate::json::{JsonObject, JsonValue};
use crate::spec::{ApiSpec, OperationSpec, ParamKind, ParamSpec, PropertyKind, SchemaDef};

pub use self::regex::{parse_regex, sample_regex, RegexError, RegexNode};

/// Alphabet of strings generated without a pattern.
pub const STRING_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_ -";
pub const STRING_LENGTH: (usize, usize) = (8, 48);
/// Upper bound for integers without an explicit maximum.
pub const INT_BOUND: i64 = 1_000_000_000;
pub const FLOAT_BOUND: f64 = 1_000_000.0;
/// Object nesting beyond this depth yields `null`, which stops cyclic schemas.
const MAX_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("{operation} needs a request body schema")]
    MissingSchema { operation: String },
    #[error("unknown schema '{0}'")]
    UnknownSchema(String),
    #[error("string parameter '{param}' has no x-regex")]
    MissingRegex { param: String },
    #[error("property '{property}' of '{schema}' has unsupported kind '{kind}'")]
    UnsupportedPropertyKind { schema: String, property: String, kind: String },
    #[error("pattern '{pattern}': {source}")]
    Regex { pattern: String, source: RegexError },
}

/// Data for one operation test: a body for POST/PUT, a map of path
/// parameters otherwise.
pub fn generate<R: Rng + ?Sized>(op: &OperationSpec, spec: &ApiSpec, rng: &mut R) -> Result<JsonValue, GenError> {
    match op.method {
        Method::Post | Method::Put => {
            let name = op.body_schema.as_deref().ok_or_else(|| GenError::MissingSchema { operation: op.to_string() })?;
            let schema = spec.schema(name).ok_or_else(|| GenError::UnknownSchema(name.to_string()))?;
            generate_from_schema(schema, spec, rng)
        }
        Method::Get | Method::Delete => {
            let mut out = JsonObject::new();
            for name in op.path_params() {
                if let Some(param) = op.param(name) {
                    out.insert(name.to_string(), generate_url_param(param, rng)?);
                }
            }
            Ok(JsonValue::Object(out))
        }
    }
}

pub fn generate_from_schema<R: Rng + ?Sized>(schema: &SchemaDef, spec: &ApiSpec, rng: &mut R) -> Result<JsonValue, GenError> {
    object(schema, spec, rng, 0)
}

fn object<R: Rng + ?Sized>(schema: &SchemaDef, spec: &ApiSpec, rng: &mut R, depth: usize) -> Result<JsonValue, GenError> {
    let mut out = JsonObject::new();
    for prop in &schema.properties {
        let value = if prop.db_generated {
            JsonValue::Generated
        } else {
            match &prop.kind {
                PropertyKind::String => match &prop.regex {
                    Some(pattern) => JsonValue::Str(pattern_string(pattern, rng)?),
                    None => JsonValue::Str(random_string(rng)),
                },
                PropertyKind::Integer => JsonValue::Int(random_int(prop.minimum, rng)),
                PropertyKind::Number => {
                    let lo = prop.minimum.map_or(0.0, |m| m as f64);
                    let hi = FLOAT_BOUND.max(lo + 1.0);
                    JsonValue::Float(rng.random_range(lo..hi))
                }
                PropertyKind::Array => JsonValue::Array(Vec::new()),
                PropertyKind::Object => match &prop.nested {
                    _ if depth >= MAX_DEPTH => JsonValue::Null,
                    Some(name) => {
                        let nested = spec.schema(name).ok_or_else(|| GenError::UnknownSchema(name.clone()))?;
                        object(nested, spec, rng, depth + 1)?
                    }
                    None => JsonValue::object(),
                },
                PropertyKind::Other(kind) => {
                    return Err(GenError::UnsupportedPropertyKind {
                        schema: schema.name.clone(),
                        property: prop.name.clone(),
                        kind: kind.clone(),
                    })
                }
            }
        };
        out.insert(prop.name.clone(), value);
    }
    Ok(JsonValue::Object(out))
}

pub fn generate_url_param<R: Rng + ?Sized>(param: &ParamSpec, rng: &mut R) -> Result<JsonValue, GenError> {
    match param.kind {
        ParamKind::String => {
            let pattern = param.regex.as_deref().ok_or_else(|| GenError::MissingRegex { param: param.name.clone() })?;
            Ok(JsonValue::Str(pattern_string(pattern, rng)?))
        }
        ParamKind::Integer => Ok(JsonValue::Int(random_int(param.minimum, rng))),
    }
}

fn pattern_string<R: Rng + ?Sized>(pattern: &str, rng: &mut R) -> Result<String, GenError> {
    sample_regex(pattern, rng).map_err(|source| GenError::Regex { pattern: pattern.to_string(), source })
}

/// Uniform in `[minimum or 1, max(INT_BOUND, minimum)]`.
pub fn random_int<R: Rng + ?Sized>(minimum: Option<i64>, rng: &mut R) -> i64 {
    let lo = minimum.unwrap_or(1);
    rng.random_range(lo..=INT_BOUND.max(lo))
}

pub fn random_string<R: Rng + ?Sized>(rng: &mut R) -> String {
    let len = rng.random_range(STRING_LENGTH.0..=STRING_LENGTH.1);
    (0..len).map(|_| STRING_ALPHABET[rng.random_range(0..STRING_ALPHABET.len())] as char).collect()
}
