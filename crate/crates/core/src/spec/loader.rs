//! Builds an [`ApiSpec`] from an OpenAPI JSON document carrying
//! `x-requires`, `x-ensures`, `x-invariants` and `x-regex` extensions.

use std::path::Path;

use indexmap::IndexMap;
use serde_json::{Map, Value};
use thiserror::Error;
use url::Url;

use super::model::*;
use crate::apostl::{check_restrictions, parse_formula, Formula, Method, SyntaxError, Violation};

const SCHEMA_PREFIX: &str = "#/components/schemas/";
const PARAMETER_PREFIX: &str = "#/components/parameters/";
const METHODS: [&str; 4] = ["get", "post", "put", "delete"];

#[derive(Debug, Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("the document is not JSON (YAML is not supported)")]
    NotJson,
    #[error("malformed JSON document: {0}")]
    MalformedDocument(String),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("unresolved reference '{reference}' in {location}")]
    UnresolvedRef { reference: String, location: String },
    #[error("cannot parse contract `{formula}` in {location}: {error}")]
    ContractParseError { location: String, formula: String, position: usize, error: SyntaxError },
    #[error("contract `{formula}` in {location}: {}", join_violations(.violations))]
    RestrictionViolation { location: String, formula: String, violations: Vec<Violation> },
    #[error("schemas '{first}' and '{second}' both use '{property}' as identifier")]
    DuplicateIdProperty { property: String, first: String, second: String },
    #[error("path parameter '{param}' of {operation} is not declared")]
    MissingParamSpec { param: String, operation: String },
    #[error("invalid server URL '{0}': an absolute http(s) URL is required")]
    InvalidBaseUrl(String),
}

fn join_violations(violations: &[Violation]) -> String {
    violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub fn load_spec_file(path: impl AsRef<Path>) -> Result<ApiSpec, SpecError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|source| SpecError::Io { path: path.display().to_string(), source })?;
    load_spec(&text)
}

pub fn load_spec(document: &str) -> Result<ApiSpec, SpecError> {
    let root: Value = serde_json::from_str(document).map_err(|e| {
        match document.trim_start().chars().next() {
            Some('{') | Some('[') | None => SpecError::MalformedDocument(e.to_string()),
            Some(_) => SpecError::NotJson,
        }
    })?;
    let root = root.as_object().ok_or_else(|| invalid("top level must be an object"))?;

    let info = root.get("info").and_then(Value::as_object);
    let text_of = |key: &str| info.and_then(|i| i.get(key)).and_then(Value::as_str).unwrap_or_default().to_string();
    let title = text_of("title");
    let version = text_of("version");
    let base_url = base_url(root)?;

    let empty = Map::new();
    let paths = match root.get("paths") {
        None => &empty,
        Some(p) => p.as_object().ok_or_else(|| invalid("'paths' must be an object"))?,
    };
    let components = root.get("components").and_then(Value::as_object);
    let raw_schemas = components.and_then(|c| c.get("schemas")).and_then(Value::as_object).unwrap_or(&empty);
    let raw_params = components.and_then(|c| c.get("parameters")).and_then(Value::as_object).unwrap_or(&empty);

    let mut apis: Vec<ApiGroup> = Vec::new();
    for (path, item) in paths {
        let item = item.as_object().ok_or_else(|| invalid(format!("path item '{path}' must be an object")))?;
        let template = parse_path(path)?;
        let group_name = match template.first() {
            Some(PathSegment::Literal(s)) => s.clone(),
            Some(PathSegment::Param(p)) => format!("{{{p}}}"),
            None => String::new(),
        };
        let index = match apis.iter().position(|a| a.name == group_name) {
            Some(i) => i,
            None => {
                apis.push(ApiGroup { name: group_name, invariants: Vec::new(), operations: Vec::new() });
                apis.len() - 1
            }
        };
        let group = &mut apis[index];
        group.invariants.extend(formulas(item.get("x-invariants"), &format!("{path} x-invariants"))?);

        let shared = parameters(item.get("parameters"), raw_params, path)?;
        for (key, raw_op) in item {
            if !METHODS.contains(&key.as_str()) {
                continue;
            }
            let method = Method::parse(key).unwrap_or(Method::Get);
            let label = format!("{method} {path}");
            let op = raw_op.as_object().ok_or_else(|| invalid(format!("{label} must be an object")))?;
            let mut params = shared.clone();
            for p in parameters(op.get("parameters"), raw_params, &label)? {
                match params.iter_mut().find(|q| q.name == p.name) {
                    Some(existing) => *existing = p,
                    None => params.push(p),
                }
            }
            for segment in &template {
                if let PathSegment::Param(name) = segment {
                    if !params.iter().any(|p| &p.name == name) {
                        return Err(SpecError::MissingParamSpec { param: name.clone(), operation: label });
                    }
                }
            }
            let body_schema = body_schema(op, raw_schemas, &label)?;
            group.operations.push(OperationSpec {
                method,
                path_template: template.clone(),
                category: Category::of(method),
                parameters: params,
                body_schema,
                preconditions: formulas(op.get("x-requires"), &format!("{label} x-requires"))?,
                postconditions: formulas(op.get("x-ensures"), &format!("{label} x-ensures"))?,
            });
        }
    }

    let schemas = schemas(raw_schemas, &apis)?;
    Ok(ApiSpec { title, version, base_url, apis, schemas })
}

fn invalid(reason: impl Into<String>) -> SpecError {
    SpecError::InvalidDocument(reason.into())
}

fn base_url(root: &Map<String, Value>) -> Result<Url, SpecError> {
    let raw = root
        .get("servers")
        .and_then(Value::as_array)
        .and_then(|s| s.first())
        .and_then(|s| s.get("url"))
        .and_then(Value::as_str)
        .ok_or_else(|| invalid("missing servers[0].url"))?;
    match Url::parse(raw) {
        Ok(url) if matches!(url.scheme(), "http" | "https") && url.has_host() => Ok(url),
        _ => Err(SpecError::InvalidBaseUrl(raw.to_string())),
    }
}

fn parse_path(path: &str) -> Result<Vec<PathSegment>, SpecError> {
    if !path.starts_with('/') {
        return Err(invalid(format!("path '{path}' must start with '/'")));
    }
    Ok(path
        .split('/')
        .filter(|s| !s.is_empty())
        .map(|s| match s.strip_prefix('{').and_then(|s| s.strip_suffix('}')) {
            Some(name) => PathSegment::Param(name.to_string()),
            None => PathSegment::Literal(s.to_string()),
        })
        .collect())
}

fn formulas(raw: Option<&Value>, location: &str) -> Result<Vec<Formula>, SpecError> {
    let Some(raw) = raw else { return Ok(Vec::new()) };
    let items = raw.as_array().ok_or_else(|| invalid(format!("{location} must be an array of strings")))?;
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let text = item.as_str().ok_or_else(|| invalid(format!("{location}[{i}] must be a string")))?;
        let at = format!("{location}[{i}]");
        let formula = parse_formula(text).map_err(|error| SpecError::ContractParseError {
            location: at.clone(),
            formula: text.to_string(),
            position: error.position,
            error,
        })?;
        let violations = check_restrictions(&formula);
        if !violations.is_empty() {
            return Err(SpecError::RestrictionViolation { location: at, formula: text.to_string(), violations });
        }
        out.push(formula);
    }
    Ok(out)
}

fn parameters(raw: Option<&Value>, shared: &Map<String, Value>, location: &str) -> Result<Vec<ParamSpec>, SpecError> {
    let Some(raw) = raw else { return Ok(Vec::new()) };
    let items = raw.as_array().ok_or_else(|| invalid(format!("parameters of {location} must be an array")))?;
    let mut out = Vec::new();
    for item in items {
        let item = match item.get("$ref").and_then(Value::as_str) {
            Some(reference) => reference
                .strip_prefix(PARAMETER_PREFIX)
                .and_then(|name| shared.get(name))
                .ok_or_else(|| SpecError::UnresolvedRef { reference: reference.into(), location: location.into() })?,
            None => item,
        };
        if item.get("in").and_then(Value::as_str) != Some("path") {
            continue;
        }
        let name = item
            .get("name")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid(format!("unnamed parameter in {location}")))?;
        let schema = item.get("schema");
        let field = |key: &str| schema.and_then(|s| s.get(key)).or_else(|| item.get(key));
        let kind = match field("type").and_then(Value::as_str) {
            Some("integer") => ParamKind::Integer,
            Some("string") | None => ParamKind::String,
            Some(other) => {
                return Err(invalid(format!("parameter '{name}' of {location} has unsupported type '{other}'")))
            }
        };
        let (regex, minimum) = match kind {
            ParamKind::String => (field("x-regex").and_then(Value::as_str).map(str::to_string), None),
            ParamKind::Integer => (None, field("minimum").and_then(Value::as_i64)),
        };
        out.push(ParamSpec { name: name.to_string(), kind, regex, minimum });
    }
    Ok(out)
}

fn schema_ref<'a>(value: &'a Value, schemas: &Map<String, Value>, location: &str) -> Result<Option<&'a str>, SpecError> {
    let Some(reference) = value.get("$ref").and_then(Value::as_str) else { return Ok(None) };
    match reference.strip_prefix(SCHEMA_PREFIX) {
        Some(name) if schemas.contains_key(name) => Ok(Some(name)),
        _ => Err(SpecError::UnresolvedRef { reference: reference.into(), location: location.into() }),
    }
}

fn body_schema(op: &Map<String, Value>, schemas: &Map<String, Value>, location: &str) -> Result<Option<String>, SpecError> {
    let Some(schema) = op
        .get("requestBody")
        .and_then(|b| b.get("content"))
        .and_then(|c| c.get("application/json"))
        .and_then(|c| c.get("schema"))
    else {
        return Ok(None);
    };
    match schema_ref(schema, schemas, location)? {
        Some(name) => Ok(Some(name.to_string())),
        None => Err(invalid(format!("request body of {location} must reference a component schema"))),
    }
}

fn schemas(raw: &Map<String, Value>, apis: &[ApiGroup]) -> Result<IndexMap<String, SchemaDef>, SpecError> {
    let mut out: IndexMap<String, SchemaDef> = IndexMap::new();
    for (name, schema) in raw {
        let location = format!("schema '{name}'");
        let mut properties = Vec::new();
        let props = schema.get("properties").and_then(Value::as_object);
        for (prop_name, prop) in props.into_iter().flatten() {
            let at = format!("{location} property '{prop_name}'");
            let nested = match schema_ref(prop, raw, &at)? {
                Some(n) => Some(n.to_string()),
                None => match prop.get("items") {
                    Some(items) => schema_ref(items, raw, &at)?.map(str::to_string),
                    None => None,
                },
            };
            let kind = match prop.get("type").and_then(Value::as_str) {
                Some("string") => PropertyKind::String,
                Some("integer") => PropertyKind::Integer,
                Some("number") => PropertyKind::Number,
                Some("array") => PropertyKind::Array,
                Some("object") => PropertyKind::Object,
                None if nested.is_some() => PropertyKind::Object,
                Some(other) => PropertyKind::Other(other.to_string()),
                None => PropertyKind::Other("untyped".to_string()),
            };
            let db_generated = prop.get("readOnly").and_then(Value::as_bool).unwrap_or(false);
            if db_generated && !matches!(kind, PropertyKind::String | PropertyKind::Integer) {
                return Err(invalid(format!("{at}: only string or integer properties can be read-only")));
            }
            properties.push(PropertySpec {
                name: prop_name.clone(),
                regex: prop.get("x-regex").and_then(Value::as_str).map(str::to_string),
                minimum: prop.get("minimum").and_then(Value::as_i64),
                kind,
                db_generated,
                nested,
            });
        }
        let required: Vec<String> = schema
            .get("required")
            .and_then(Value::as_array)
            .map(|r| r.iter().filter_map(Value::as_str).map(str::to_string).collect())
            .unwrap_or_default();
        let id_property = identify(name, &properties, &required, apis)
            .ok_or_else(|| invalid(format!("{location} has no properties to use as identifier")))?;
        if let Some(other) = out.values().find(|s| s.id_property == id_property) {
            return Err(SpecError::DuplicateIdProperty {
                property: id_property,
                first: other.name.clone(),
                second: name.clone(),
            });
        }
        out.insert(name.clone(), SchemaDef { name: name.clone(), id_property, properties, required });
    }
    Ok(out)
}

/// The first required property named like a path parameter of a group that
/// uses the schema; otherwise the first required property.
fn identify(schema: &str, properties: &[PropertySpec], required: &[String], apis: &[ApiGroup]) -> Option<String> {
    let candidates: Vec<&str> = required
        .iter()
        .map(String::as_str)
        .filter(|r| properties.iter().any(|p| p.name == *r))
        .collect();
    let mut groups = apis
        .iter()
        .filter(|api| api.operations.iter().any(|op| op.body_schema.as_deref() == Some(schema)))
        .peekable();
    let params: Vec<&str> = if groups.peek().is_some() {
        groups.flat_map(|api| api.operations.iter().flat_map(|op| op.path_params())).collect()
    } else {
        apis.iter().flat_map(|api| api.operations.iter().flat_map(|op| op.path_params())).collect()
    };
    candidates
        .iter()
        .find(|c| params.contains(c))
        .or(candidates.first())
        .map(|s| s.to_string())
        .or_else(|| properties.first().map(|p| p.name.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(paths: Value, schemas: Value) -> String {
        serde_json::json!({
            "openapi": "3.0.0",
            "info": {"title": "t", "version": "1"},
            "servers": [{"url": "http://localhost:8080"}],
            "paths": paths,
            "components": {"schemas": schemas}
        })
        .to_string()
    }

    fn item_schema() -> Value {
        serde_json::json!({"Item": {
            "type": "object",
            "required": ["itemId", "name"],
            "properties": {
                "itemId": {"type": "integer", "readOnly": true},
                "name": {"type": "string"}
            }
        }})
    }

    #[test]
    fn empty_paths_give_no_apis() {
        let spec = load_spec(&doc(serde_json::json!({}), serde_json::json!({}))).unwrap();
        assert!(spec.apis.is_empty());
        assert_eq!(spec.base_url.as_str(), "http://localhost:8080/");
    }

    #[test]
    fn groups_by_first_segment_in_document_order() {
        let paths = serde_json::json!({
            "/items": {
                "x-invariants": ["T"],
                "get": {},
                "post": {"requestBody": {"content": {"application/json": {"schema": {"$ref": "#/components/schemas/Item"}}}}}
            },
            "/other": {"get": {}},
            "/items/{itemId}": {
                "parameters": [{"name": "itemId", "in": "path", "schema": {"type": "integer", "minimum": 1}}],
                "delete": {"x-requires": ["response_code(GET /items/{itemId}) == 200"]}
            }
        });
        let spec = load_spec(&doc(paths, item_schema())).unwrap();
        let names: Vec<_> = spec.apis.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["items", "other"]);
        let items = &spec.apis[0];
        assert_eq!(items.invariants.len(), 1);
        let labels: Vec<_> = items.operations.iter().map(|o| o.to_string()).collect();
        assert_eq!(labels, ["GET /items", "POST /items", "DELETE /items/{itemId}"]);
        assert_eq!(items.operations[2].parameters[0].minimum, Some(1));
        assert_eq!(items.operations[2].category, Category::Mutator);
        let schema = spec.schema("Item").unwrap();
        assert_eq!(schema.id_property, "itemId");
        assert!(schema.properties[0].db_generated);
    }

    #[test]
    fn rejects_dangling_refs() {
        let paths = serde_json::json!({"/x": {"post": {"requestBody": {"content": {"application/json": {"schema": {"$ref": "#/components/schemas/Nope"}}}}}}});
        assert!(matches!(load_spec(&doc(paths, serde_json::json!({}))), Err(SpecError::UnresolvedRef { .. })));
    }

    #[test]
    fn rejects_bad_contracts() {
        let paths = serde_json::json!({"/x": {"get": {"x-ensures": ["response_code(GET /x) =="]}}});
        assert!(matches!(load_spec(&doc(paths, serde_json::json!({}))), Err(SpecError::ContractParseError { .. })));
        let paths = serde_json::json!({"/x": {"get": {"x-ensures": ["response_code(POST /x) == 200"]}}});
        assert!(matches!(load_spec(&doc(paths, serde_json::json!({}))), Err(SpecError::RestrictionViolation { .. })));
    }

    #[test]
    fn rejects_shared_identifier_names() {
        let schemas = serde_json::json!({
            "A": {"required": ["key"], "properties": {"key": {"type": "string"}}},
            "B": {"required": ["key"], "properties": {"key": {"type": "string"}}}
        });
        let err = load_spec(&doc(serde_json::json!({}), schemas)).unwrap_err();
        assert!(matches!(err, SpecError::DuplicateIdProperty { .. }), "{err}");
    }

    #[test]
    fn rejects_undeclared_path_parameters_and_yaml() {
        let paths = serde_json::json!({"/x/{id}": {"get": {}}});
        assert!(matches!(load_spec(&doc(paths, serde_json::json!({}))), Err(SpecError::MissingParamSpec { .. })));
        assert!(matches!(load_spec("openapi: 3.0.0\n"), Err(SpecError::NotJson)));
        assert!(matches!(load_spec("{\"a\":"), Err(SpecError::MalformedDocument(_))));
    }

    #[test]
    fn rejects_non_http_servers() {
        let text = doc(serde_json::json!({}), serde_json::json!({})).replace("http://localhost:8080", "ftp://x");
        assert!(matches!(load_spec(&text), Err(SpecError::InvalidBaseUrl(_))));
    }
}
