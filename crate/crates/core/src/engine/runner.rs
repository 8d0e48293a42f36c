//! Test orchestration: ordering, data, conditions, requests and verdicts.

use std::collections::HashSet;

use indexmap::IndexMap;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::pool::ObjectPool;
use super::strategy::{reorganize, OrderStrategy};
use super::verdict::*;
use crate::apostl::eval::{evaluate_all, snapshot_previous, EvalContext, EvalReport, PreviousResults};
use crate::apostl::{Formula, Method};
use crate::datagen::{generate, generate_from_schema, generate_url_param, GenError};
use crate::http::{join_url, HttpResponse, Transport};
use crate::json::JsonValue;
use crate::spec::{ApiGroup, ApiSpec, OperationSpec, PathSegment};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestOptions {
    /// Shuffle the order in which APIs are tested.
    pub randomize_apis: bool,
    /// Seed of the run's random source; drawn from the OS when absent.
    pub seed: Option<u64>,
    /// Keep document order inside each category block.
    pub stable_order: bool,
}

#[derive(Debug, Error)]
enum DataError {
    #[error(transparent)]
    Generation(#[from] GenError),
    #[error("no schema or parameter declaration provides '{0}'")]
    UnknownParameter(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReversalRequest {
    pub url: String,
    pub code: Option<u16>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReversalReport {
    pub requests: Vec<ReversalRequest>,
}

impl ReversalReport {
    /// 200 and 404 both leave the resource gone.
    pub fn ok(&self) -> bool {
        self.requests.iter().all(|r| matches!(r.code, Some(200) | Some(404)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestRun {
    pub results: Vec<ApiResult>,
    pub reversal: ReversalReport,
    /// Pool as it stood when effects were reverted.
    pub pool: ObjectPool,
}

impl TestRun {
    pub fn not_ok(&self) -> usize {
        self.results.iter().map(|r| r.not_ok).sum()
    }

    pub fn api(&self, name: &str) -> Option<&ApiResult> {
        self.results.iter().find(|r| r.name == name)
    }
}

/// Tests every API of `spec` and reverts the effects afterwards.
pub fn test_specification(
    spec: &ApiSpec,
    strategy: OrderStrategy,
    options: &TestOptions,
    transport: &dyn Transport,
) -> TestRun {
    Engine::new(spec, transport, options).run(strategy)
}

pub struct Engine<'a> {
    spec: &'a ApiSpec,
    transport: &'a dyn Transport,
    stable_order: bool,
    randomize_apis: bool,
    rng: ChaCha8Rng,
    pool: ObjectPool,
    mask: HashSet<String>,
}

/// Names resolved for the current operation test.
type Bindings = IndexMap<String, String>;

impl<'a> Engine<'a> {
    pub fn new(spec: &'a ApiSpec, transport: &'a dyn Transport, options: &TestOptions) -> Self {
        let rng = match options.seed {
            Some(seed) => ChaCha8Rng::seed_from_u64(seed),
            None => ChaCha8Rng::from_os_rng(),
        };
        Engine {
            spec,
            transport,
            stable_order: options.stable_order,
            randomize_apis: options.randomize_apis,
            rng,
            pool: ObjectPool::new(),
            mask: spec.generated_properties(),
        }
    }

    pub fn pool(&self) -> &ObjectPool {
        &self.pool
    }

    pub fn run(mut self, strategy: OrderStrategy) -> TestRun {
        let mut apis: Vec<&ApiGroup> = self.spec.apis.iter().collect();
        if self.randomize_apis {
            apis.shuffle(&mut self.rng);
        }
        let results = apis.into_iter().map(|api| self.test_api(api, strategy)).collect();
        let reversal = self.delete_effects();
        TestRun { results, reversal, pool: self.pool }
    }

    pub fn test_api(&mut self, api: &ApiGroup, strategy: OrderStrategy) -> ApiResult {
        let ordered = reorganize(&api.operations, strategy, self.stable_order, &mut self.rng);
        let verdicts = ordered.into_iter().map(|op| self.test_operation(op, &api.invariants)).collect();
        ApiResult::new(api.name.clone(), verdicts)
    }

    fn context(&self) -> EvalContext<'_> {
        EvalContext::new(&self.spec.base_url, self.transport, &self.mask)
    }

    pub fn test_operation(&mut self, op: &OperationSpec, invariants: &[Formula]) -> OperationVerdict {
        let mut trace = vec![Step::Invariants(evaluate_all(invariants, &self.context()))];
        let finish = |trace, outcome| OperationVerdict { method: op.method, path: op.path(), outcome, trace };

        let (source, data, recycled) = match self.prepare_data(op) {
            Ok(prepared) => prepared,
            Err((source, e)) => {
                trace.push(Step::Data { source, error: Some(e.to_string()) });
                return finish(trace, Outcome::Inconclusive);
            }
        };
        let bindings = match self.resolve(op, &data, recycled.as_ref()) {
            Ok(b) => b,
            Err(e) => {
                trace.push(Step::Data { source, error: Some(e.to_string()) });
                return finish(trace, Outcome::Inconclusive);
            }
        };
        trace.push(Step::Data { source, error: None });

        let pre_lookup = lookup(&bindings);
        let preconditions: Vec<Formula> = op.preconditions.iter().map(|f| f.substitute(&pre_lookup)).collect();
        let postconditions: Vec<Formula> = op.postconditions.iter().map(|f| f.substitute(&pre_lookup)).collect();
        let (with_previous, plain): (Vec<_>, Vec<_>) = postconditions.into_iter().partition(Formula::uses_previous);

        let body = matches!(op.method, Method::Post | Method::Put).then_some(&data);
        let mut ctx = self.context();
        ctx.this_request_body = body;
        let pre = evaluate_all(&preconditions, &ctx);
        let pre_ok = pre.satisfied();
        trace.push(Step::Preconditions(pre));
        let snapshot: PreviousResults = snapshot_previous(&with_previous, &ctx);

        let url = self.operation_url(op, &bindings);
        let sent = self.transport.send(op.method, &url, body);
        let mut record = RequestRecord {
            method: op.method,
            url: url.to_string(),
            code: None,
            message: None,
            transport_error: None,
            response_body: None,
        };
        let response = match sent {
            Ok(r) => {
                record.code = Some(r.code);
                record.message = r.message.clone();
                record.response_body = r.body.clone();
                Some(r)
            }
            Err(e) => {
                record.transport_error = Some(e.reason);
                None
            }
        };
        trace.push(Step::Request(record));

        let Some(response) = response.filter(HttpResponse::is_success) else {
            return finish(trace, Outcome::classify(false, pre_ok, false));
        };

        // Server-assigned values of a freshly created resource.
        let patched = patch_generated(&data, response.body.as_ref());
        let plain = if op.method == Method::Post {
            let mut rebound = bindings.clone();
            for (name, value) in rebound.iter_mut() {
                if let Some(text) = patched.get(name).and_then(JsonValue::to_url_text) {
                    *value = text;
                }
            }
            let post_lookup = lookup(&rebound);
            op.postconditions
                .iter()
                .filter(|f| !f.uses_previous())
                .map(|f| f.substitute(&post_lookup))
                .collect()
        } else {
            plain
        };

        let mut ctx = self.context();
        ctx.this_request_body = body;
        ctx.this_response = Some(&response);
        let mut post = evaluate_all(&plain, &ctx);
        ctx.previous = Some(&snapshot);
        post.merge(evaluate_all(&with_previous, &ctx));
        let post_ok = post.satisfied();
        trace.push(Step::Postconditions(post));

        if op.method == Method::Post {
            self.add_to_pool(op, patched);
        }
        finish(trace, Outcome::classify(true, pre_ok, post_ok))
    }

    /// Body or parameter object for the test, plus the recycled pool object
    /// when one was used.
    #[allow(clippy::type_complexity)]
    fn prepare_data(
        &mut self,
        op: &OperationSpec,
    ) -> Result<(DataSource, JsonValue, Option<JsonValue>), (DataSource, DataError)> {
        let fresh = |engine: &mut Self| {
            generate(op, engine.spec, &mut engine.rng)
                .map(|d| (DataSource::Generated, d, None))
                .map_err(|e| (DataSource::Generated, e.into()))
        };
        if op.method == Method::Post {
            return fresh(self);
        }
        let Some(schema) = self.target_schema(op) else { return fresh(self) };
        let Some(recycled) = self.pool.recycle(schema).cloned() else { return fresh(self) };
        if op.method != Method::Put {
            return Ok((DataSource::Recycled, recycled.clone(), Some(recycled)));
        }
        // Updates send new content for the recycled resource.
        let def = self.spec.schema(schema).ok_or((DataSource::Recycled, DataError::Generation(GenError::UnknownSchema(schema.into()))))?;
        let mut body = generate_from_schema(def, self.spec, &mut self.rng).map_err(|e| (DataSource::Recycled, e.into()))?;
        if let (Some(map), Some(id)) = (body.as_object_mut(), recycled.get(&def.id_property)) {
            map.insert(def.id_property.clone(), id.clone());
        }
        Ok((DataSource::Recycled, body, Some(recycled)))
    }

    /// The schema an operation works on: its body schema, else the schema
    /// identified by its last path parameter.
    fn target_schema(&self, op: &OperationSpec) -> Option<&'a str> {
        if let Some(name) = &op.body_schema {
            return self.spec.schema(name).map(|s| s.name.as_str());
        }
        let last = op.path_params().last()?;
        self.spec.schema_with_id(last).map(|s| s.name.as_str())
    }

    /// Values for the operation's path parameters and every placeholder of
    /// its contract.
    fn resolve(&mut self, op: &OperationSpec, data: &JsonValue, recycled: Option<&JsonValue>) -> Result<Bindings, DataError> {
        let mut names: Vec<String> = op.path_params().map(str::to_string).collect();
        for formula in op.preconditions.iter().chain(&op.postconditions) {
            for name in formula.placeholder_names() {
                if !names.contains(&name) {
                    names.push(name);
                }
            }
        }
        let mut out = Bindings::new();
        for name in names {
            let concrete = |v: Option<&JsonValue>| v.and_then(JsonValue::to_url_text);
            let value = concrete(data.get(&name))
                .or_else(|| concrete(recycled.and_then(|r| r.get(&name))))
                .or_else(|| concrete(self.pool.find_by_id(self.spec, &name).and_then(|o| o.get(&name))));
            let value = match value {
                Some(v) => v,
                None => {
                    let param = op.param(&name).or_else(|| self.spec.param_spec(&name));
                    let param = param.ok_or_else(|| DataError::UnknownParameter(name.clone()))?;
                    let generated = generate_url_param(param, &mut self.rng)?;
                    generated.to_url_text().ok_or_else(|| DataError::UnknownParameter(name.clone()))?
                }
            };
            out.insert(name, value);
        }
        Ok(out)
    }

    fn operation_url(&self, op: &OperationSpec, bindings: &Bindings) -> url::Url {
        let segments: Vec<String> = op
            .path_template
            .iter()
            .map(|s| match s {
                PathSegment::Literal(text) => text.clone(),
                PathSegment::Param(name) => bindings.get(name).cloned().unwrap_or_else(|| format!("{{{name}}}")),
            })
            .collect();
        join_url(&self.spec.base_url, &segments)
    }

    fn add_to_pool(&mut self, op: &OperationSpec, object: JsonValue) {
        let Some(schema) = op.body_schema.as_deref().and_then(|n| self.spec.schema(n)) else { return };
        if object.get(&schema.id_property).and_then(JsonValue::to_url_text).is_some() {
            self.pool.add(&schema.name, object);
        }
    }

    /// Applies every DELETE operation to every pooled resource it can
    /// address. Operations with more path parameters go first so that
    /// nested resources disappear before their parents.
    pub fn delete_effects(&mut self) -> ReversalReport {
        let mut deletes: Vec<&OperationSpec> = self.spec.operations().filter(|op| op.method == Method::Delete).collect();
        deletes.sort_by_key(|op| std::cmp::Reverse(op.path_params().count()));
        let mut seen = HashSet::new();
        let mut report = ReversalReport::default();
        for op in deletes {
            let Some(schema) = self.target_schema(op) else { continue };
            for object in self.pool.objects(schema) {
                let mut bindings = Bindings::new();
                for name in op.path_params() {
                    let value = object
                        .get(name)
                        .and_then(JsonValue::to_url_text)
                        .or_else(|| self.pool.find_by_id(self.spec, name).and_then(|o| o.get(name)).and_then(JsonValue::to_url_text));
                    if let Some(v) = value {
                        bindings.insert(name.to_string(), v);
                    }
                }
                if bindings.len() != op.path_params().count() {
                    continue;
                }
                let url = self.operation_url(op, &bindings);
                if !seen.insert(url.to_string()) {
                    continue;
                }
                let (code, error) = match self.transport.send(Method::Delete, &url, None) {
                    Ok(r) => (Some(r.code), None),
                    Err(e) => (None, Some(e.reason)),
                };
                report.requests.push(ReversalRequest { url: url.to_string(), code, error });
            }
        }
        report
    }
}

fn lookup(bindings: &Bindings) -> impl Fn(&str) -> Option<String> + '_ {
    move |name| bindings.get(name).cloned()
}

/// Copy of `data` whose generated members take the values found in `body`.
fn patch_generated(data: &JsonValue, body: Option<&JsonValue>) -> JsonValue {
    let mut out = data.clone();
    if let (Some(map), Some(JsonValue::Object(response))) = (out.as_object_mut(), body) {
        for (key, value) in map.iter_mut() {
            if value.is_generated() {
                if let Some(assigned) = response.get(key).filter(|v| !matches!(v, JsonValue::Null)) {
                    *value = assigned.clone();
                }
            }
        }
    }
    out
}

/// Evaluates a set of invariants outside any operation test.
pub fn check_invariants(spec: &ApiSpec, api: &ApiGroup, transport: &dyn Transport) -> EvalReport {
    let mask = spec.generated_properties();
    evaluate_all(&api.invariants, &EvalContext::new(&spec.base_url, transport, &mask))
}
