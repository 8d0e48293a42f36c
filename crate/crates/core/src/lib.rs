//! Contract-driven black-box testing of REST services.
//!
//! A specification is an OpenAPI JSON document whose operations carry
//! preconditions (`x-requires`), postconditions (`x-ensures`) and API
//! invariants (`x-invariants`) written in a small first-order contract
//! language. The engine generates data, exercises the service over HTTP and
//! classifies each operation against its contract.

pub mod apostl;
pub mod datagen;
pub mod engine;
pub mod http;
pub mod json;
pub mod spec;

pub use apostl::{check_restrictions, parse_formula, Formula, Method, SyntaxError, Violation};
pub use engine::{render_report, test_specification, ApiResult, OrderStrategy, Outcome, TestOptions, TestRun};
pub use http::{HttpResponse, HttpTransport, SpyTransport, Transport, TransportError};
pub use json::{JsonObject, JsonValue};
pub use spec::{load_spec, load_spec_file, ApiGroup, ApiSpec, OperationSpec, SpecError};
