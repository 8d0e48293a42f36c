use std::collections::HashSet;
use std::fmt;

use indexmap::IndexMap;
use url::Url;

use crate::apostl::{Formula, Method};

#[derive(Debug, Clone, PartialEq)]
pub struct ApiSpec {
    pub title: String,
    pub version: String,
    pub base_url: Url,
    pub apis: Vec<ApiGroup>,
    pub schemas: IndexMap<String, SchemaDef>,
}

impl ApiSpec {
    pub fn schema(&self, name: &str) -> Option<&SchemaDef> {
        self.schemas.get(name)
    }

    /// The schema whose identifier is called `id_name`, if any.
    pub fn schema_with_id(&self, id_name: &str) -> Option<&SchemaDef> {
        self.schemas.values().find(|s| s.id_property == id_name)
    }

    /// Names of every database-generated property across all schemas.
    pub fn generated_properties(&self) -> HashSet<String> {
        self.schemas
            .values()
            .flat_map(|s| s.properties.iter())
            .filter(|p| p.db_generated)
            .map(|p| p.name.clone())
            .collect()
    }

    /// First declaration of a path parameter called `name` anywhere in the
    /// document.
    pub fn param_spec(&self, name: &str) -> Option<&ParamSpec> {
        self.operations().flat_map(|op| op.parameters.iter()).find(|p| p.name == name)
    }

    pub fn operations(&self) -> impl Iterator<Item = &OperationSpec> {
        self.apis.iter().flat_map(|api| api.operations.iter())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApiGroup {
    /// First path segment shared by the group's operations.
    pub name: String,
    pub invariants: Vec<Formula>,
    pub operations: Vec<OperationSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Constructor,
    Mutator,
    Observer,
}

impl Category {
    pub fn of(method: Method) -> Category {
        match method {
            Method::Post => Category::Constructor,
            Method::Put | Method::Delete => Category::Mutator,
            Method::Get => Category::Observer,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Category::Constructor => 'C',
            Category::Mutator => 'M',
            Category::Observer => 'O',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathSegment {
    Literal(String),
    Param(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperationSpec {
    pub method: Method,
    pub path_template: Vec<PathSegment>,
    pub category: Category,
    pub parameters: Vec<ParamSpec>,
    pub body_schema: Option<String>,
    pub preconditions: Vec<Formula>,
    pub postconditions: Vec<Formula>,
}

impl OperationSpec {
    /// The templated path, e.g. `/players/{playerNIF}`.
    pub fn path(&self) -> String {
        let mut out = String::new();
        for segment in &self.path_template {
            out.push('/');
            match segment {
                PathSegment::Literal(s) => out.push_str(s),
                PathSegment::Param(p) => {
                    out.push('{');
                    out.push_str(p);
                    out.push('}');
                }
            }
        }
        if out.is_empty() {
            out.push('/');
        }
        out
    }

    pub fn path_params(&self) -> impl Iterator<Item = &str> {
        self.path_template.iter().filter_map(|s| match s {
            PathSegment::Param(p) => Some(p.as_str()),
            PathSegment::Literal(_) => None,
        })
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

impl fmt::Display for OperationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.method, self.path())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    String,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Only for string parameters.
    pub regex: Option<String>,
    /// Only for integer parameters.
    pub minimum: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PropertyKind {
    String,
    Integer,
    Number,
    Array,
    Object,
    /// Anything else the document declares; generation rejects it.
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySpec {
    pub name: String,
    pub kind: PropertyKind,
    pub regex: Option<String>,
    pub minimum: Option<i64>,
    pub db_generated: bool,
    /// Referenced schema of an object property or of array items.
    pub nested: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaDef {
    pub name: String,
    pub id_property: String,
    pub properties: Vec<PropertySpec>,
    pub required: Vec<String>,
}

impl SchemaDef {
    pub fn property(&self, name: &str) -> Option<&PropertySpec> {
        self.properties.iter().find(|p| p.name == name)
    }
}
