//! Evaluation of formulas against a live service.
//!
//! Requests made here are always GETs. `previous(..)` terms never hit the
//! network during evaluation; they are read from the snapshot taken by
//! [`snapshot_previous`] before the operation under test ran.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;
use url::Url;

use super::ast::*;
use crate::http::{join_url, HttpResponse, Transport};
use crate::json::JsonValue;

#[derive(Debug, Clone, PartialEq)]
pub enum EvalValue {
    Num(f64),
    Json(JsonValue),
    Code(u16),
}

impl EvalValue {
    fn kind(&self) -> &'static str {
        match self {
            EvalValue::Num(_) => "number",
            EvalValue::Code(_) => "status code",
            EvalValue::Json(j) => j.kind(),
        }
    }

    fn numeric(&self) -> Option<f64> {
        match self {
            EvalValue::Num(n) => Some(*n),
            EvalValue::Code(c) => Some(f64::from(*c)),
            EvalValue::Json(j) => j.as_f64(),
        }
    }

    fn to_url_text(&self) -> Option<String> {
        match self {
            EvalValue::Num(n) if n.fract() == 0.0 => Some(format!("{}", *n as i64)),
            EvalValue::Num(n) => Some(n.to_string()),
            EvalValue::Code(c) => Some(c.to_string()),
            EvalValue::Json(j) => j.to_url_text(),
        }
    }
}

impl fmt::Display for EvalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalValue::Num(n) => write!(f, "{n}"),
            EvalValue::Code(c) => write!(f, "{c}"),
            EvalValue::Json(j) => write!(f, "{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unresolved placeholder {{{0}}}")]
    UnresolvedPlaceholder(String),
    #[error("{0}")]
    Transport(String),
    #[error("cannot compare {lhs} {cmp} {rhs}")]
    TypeMismatch { lhs: &'static str, cmp: &'static str, rhs: &'static str },
    #[error("no snapshot for previous({0})")]
    UnboundPrevious(String),
    #[error("length applied to {0}, expected an array")]
    LengthOnNonArray(&'static str),
    #[error("unknown function '{0}'")]
    UnknownFunction(String),
    #[error("quantified collection is {0}, expected an array")]
    NonArrayCollection(&'static str),
    #[error("collection element has no property '{0}'")]
    MissingProperty(String),
    #[error("unbound parameter '{0}'")]
    UnboundParam(String),
    #[error("response body of {0} is not JSON")]
    NonJsonBody(String),
    #[error("no response available for 'this'")]
    NoResponse,
    #[error("the operation under test has no request body")]
    NoRequestBody,
    #[error("request_body is only defined for 'this'")]
    RequestBodyOfRequest,
    #[error("value {0} cannot be used inside a URL")]
    NotUrlValue(String),
}

pub type PreviousResults = HashMap<String, EvalValue>;

/// Everything a formula may refer to.
pub struct EvalContext<'a> {
    pub base_url: &'a Url,
    pub transport: &'a dyn Transport,
    pub this_request_body: Option<&'a JsonValue>,
    pub this_response: Option<&'a HttpResponse>,
    pub previous: Option<&'a PreviousResults>,
    /// Property names ignored by body equality.
    pub mask: &'a HashSet<String>,
}

impl<'a> EvalContext<'a> {
    pub fn new(base_url: &'a Url, transport: &'a dyn Transport, mask: &'a HashSet<String>) -> Self {
        EvalContext { base_url, transport, this_request_body: None, this_response: None, previous: None, mask }
    }
}

/// Quantifier variable bound to the current collection element.
type Binding<'b> = Option<(&'b str, &'b JsonValue)>;

pub fn evaluate(formula: &Formula, ctx: &EvalContext<'_>) -> Result<bool, EvalError> {
    match formula {
        Formula::Quantified(q) => evaluate_quantified(q, ctx),
        Formula::Boolean(b) => eval_expression(b, ctx, None),
    }
}

pub fn evaluate_quantified(q: &QuantifiedFormula, ctx: &EvalContext<'_>) -> Result<bool, EvalError> {
    let collection = match &q.collection {
        Call::Op(op) => eval_operation(op, ctx, None)?,
        Call::Previous(op) => lookup_previous(op, ctx)?,
    };
    let items = match &collection {
        EvalValue::Json(JsonValue::Array(items)) => items,
        other => return Err(EvalError::NonArrayCollection(other.kind())),
    };
    for elem in items {
        let bind = |props: &[String]| property(elem, props).and_then(JsonValue::to_url_text);
        let body = q
            .body
            .bind_variable(&q.variable, &bind)
            .map_err(|missing| EvalError::MissingProperty(missing.join(", ")))?;
        let holds = eval_expression(&body, ctx, Some((&q.variable, elem)))?;
        match q.quantifier {
            Quantifier::ForAll if !holds => return Ok(false),
            Quantifier::Exists if holds => return Ok(true),
            _ => {}
        }
    }
    Ok(q.quantifier == Quantifier::ForAll)
}

fn property<'j>(value: &'j JsonValue, path: &[String]) -> Option<&'j JsonValue> {
    path.iter().try_fold(value, |v, key| v.get(key))
}

fn eval_expression(expr: &BooleanExpression, ctx: &EvalContext<'_>, binding: Binding<'_>) -> Result<bool, EvalError> {
    match expr {
        BooleanExpression::Binary { op, lhs, rhs } => {
            let left = eval_expression(lhs, ctx, binding)?;
            match op {
                BoolOp::And if !left => Ok(false),
                BoolOp::Or if left => Ok(true),
                BoolOp::Implies if !left => Ok(true),
                _ => eval_expression(rhs, ctx, binding),
            }
        }
        BooleanExpression::Clause(Clause::True) => Ok(true),
        BooleanExpression::Clause(Clause::False) => Ok(false),
        BooleanExpression::Clause(Clause::Comparison(c)) => {
            let lhs = eval_term_bound(&c.lhs, ctx, binding)?;
            let rhs = eval_term_bound(&c.rhs, ctx, binding)?;
            compare(&lhs, c.cmp, &rhs, ctx.mask)
        }
    }
}

/// Compares two values. Numbers, status codes and numeric JSON compare
/// numerically; other JSON supports only `==` and `!=`.
pub fn compare(lhs: &EvalValue, cmp: Comparator, rhs: &EvalValue, mask: &HashSet<String>) -> Result<bool, EvalError> {
    if let (Some(a), Some(b)) = (lhs.numeric(), rhs.numeric()) {
        return Ok(match cmp {
            Comparator::Eq => a == b,
            Comparator::Ne => a != b,
            Comparator::Le => a <= b,
            Comparator::Ge => a >= b,
            Comparator::Lt => a < b,
            Comparator::Gt => a > b,
        });
    }
    match (lhs, rhs, cmp) {
        (EvalValue::Json(a), EvalValue::Json(b), Comparator::Eq) => Ok(a.eq_masked(b, mask)),
        (EvalValue::Json(a), EvalValue::Json(b), Comparator::Ne) => Ok(!a.eq_masked(b, mask)),
        _ => Err(EvalError::TypeMismatch { lhs: lhs.kind(), cmp: cmp.symbol(), rhs: rhs.kind() }),
    }
}

pub fn eval_term(term: &Term, ctx: &EvalContext<'_>) -> Result<EvalValue, EvalError> {
    eval_term_bound(term, ctx, None)
}

fn eval_term_bound(term: &Term, ctx: &EvalContext<'_>, binding: Binding<'_>) -> Result<EvalValue, EvalError> {
    match term {
        Term::Int(i) => Ok(EvalValue::Num(*i as f64)),
        Term::Op(op) => eval_operation(op, ctx, binding),
        Term::Previous(op) => lookup_previous(op, ctx),
        Term::Param(path) => match binding {
            Some((var, elem)) if path[0] == var => property(elem, &path[1..])
                .map(|v| EvalValue::Json(v.clone()))
                .ok_or_else(|| EvalError::MissingProperty(path[1..].join("."))),
            _ => Err(EvalError::UnboundParam(path.join("."))),
        },
    }
}

fn lookup_previous(op: &OperationRef, ctx: &EvalContext<'_>) -> Result<EvalValue, EvalError> {
    let key = op.to_string();
    ctx.previous.and_then(|p| p.get(&key)).cloned().ok_or(EvalError::UnboundPrevious(key))
}

fn eval_operation(op: &OperationRef, ctx: &EvalContext<'_>, binding: Binding<'_>) -> Result<EvalValue, EvalError> {
    let value = match &op.target {
        Target::This => match op.header {
            Header::RequestBody => EvalValue::Json(ctx.this_request_body.ok_or(EvalError::NoRequestBody)?.clone()),
            Header::ResponseCode => EvalValue::Code(ctx.this_response.ok_or(EvalError::NoResponse)?.code),
            Header::ResponseBody => {
                let response = ctx.this_response.ok_or(EvalError::NoResponse)?;
                EvalValue::Json(response.body.clone().ok_or_else(|| EvalError::NonJsonBody("this".into()))?)
            }
        },
        Target::Request(req) => {
            if op.header == Header::RequestBody {
                return Err(EvalError::RequestBodyOfRequest);
            }
            let url = resolve_url(req, ctx, binding)?;
            let response =
                ctx.transport.send(Method::Get, &url, None).map_err(|e| EvalError::Transport(e.to_string()))?;
            match op.header {
                Header::ResponseCode => EvalValue::Code(response.code),
                _ => EvalValue::Json(response.body.ok_or_else(|| EvalError::NonJsonBody(format!("GET {url}")))?),
            }
        }
    };
    match &op.function {
        None => Ok(value),
        Some(name) => apply_function(name, value),
    }
}

fn apply_function(name: &str, value: EvalValue) -> Result<EvalValue, EvalError> {
    match name {
        "length" => match value {
            EvalValue::Json(JsonValue::Array(items)) => Ok(EvalValue::Num(items.len() as f64)),
            other => Err(EvalError::LengthOnNonArray(other.kind())),
        },
        other => Err(EvalError::UnknownFunction(other.to_string())),
    }
}

fn resolve_url(req: &HttpRequest, ctx: &EvalContext<'_>, binding: Binding<'_>) -> Result<Url, EvalError> {
    let mut segments = Vec::with_capacity(req.segments.len());
    for segment in &req.segments {
        let mut text = String::new();
        for (i, block) in segment.iter().enumerate() {
            if i > 0 {
                text.push('.');
            }
            let value = match block {
                Block::Literal(s) => s.clone(),
                Block::Placeholder(BlockParameter::Name(path)) => match binding {
                    Some((var, elem)) if path[0] == var => property(elem, &path[1..])
                        .and_then(JsonValue::to_url_text)
                        .ok_or_else(|| EvalError::MissingProperty(path[1..].join(".")))?,
                    _ => return Err(EvalError::UnresolvedPlaceholder(path.join("."))),
                },
                Block::Placeholder(BlockParameter::NestedOp(op)) => {
                    let v = eval_operation(op, ctx, binding)?;
                    v.to_url_text().ok_or_else(|| EvalError::NotUrlValue(v.to_string()))?
                }
                Block::Placeholder(BlockParameter::NestedPrevious(op)) => {
                    let v = lookup_previous(op, ctx)?;
                    v.to_url_text().ok_or_else(|| EvalError::NotUrlValue(v.to_string()))?
                }
            };
            text.push_str(&value);
        }
        segments.push(text);
    }
    Ok(join_url(ctx.base_url, &segments))
}

/// Executes every `previous(..)` operation of `formulas` once and stores its
/// value under the operation's printed form.
///
/// A transport failure stores `null` for body headers so that comparisons
/// still run; other failures leave the key unbound.
pub fn snapshot_previous(formulas: &[Formula], ctx: &EvalContext<'_>) -> PreviousResults {
    let mut wanted: Vec<OperationRef> = Vec::new();
    for formula in formulas {
        formula.visit_operations(&mut |op, is_previous| {
            if is_previous && !wanted.contains(op) {
                wanted.push(op.clone());
            }
        });
    }
    let mut out = PreviousResults::new();
    for op in wanted {
        let key = op.to_string();
        if out.contains_key(&key) {
            continue;
        }
        match eval_operation(&op, ctx, None) {
            Ok(value) => {
                out.insert(key, value);
            }
            Err(EvalError::Transport(_)) if op.header != Header::ResponseCode => {
                out.insert(key, EvalValue::Json(JsonValue::Null));
            }
            Err(_) => {}
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct FailedCondition {
    /// The formula as evaluated, with parameters substituted.
    pub formula: String,
    /// Set when evaluation raised an error instead of yielding `false`.
    pub reason: Option<String>,
}

impl fmt::Display for FailedCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reason {
            Some(reason) => write!(f, "{} [error: {reason}]", self.formula),
            None => f.write_str(&self.formula),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalReport {
    pub failed: Vec<FailedCondition>,
    pub passed: usize,
}

impl EvalReport {
    pub fn satisfied(&self) -> bool {
        self.failed.is_empty()
    }

    pub fn merge(&mut self, other: EvalReport) {
        self.failed.extend(other.failed);
        self.passed += other.passed;
    }
}

/// Evaluates each formula, collecting the ones that do not hold.
pub fn evaluate_all(formulas: &[Formula], ctx: &EvalContext<'_>) -> EvalReport {
    let mut report = EvalReport::default();
    for formula in formulas {
        match evaluate(formula, ctx) {
            Ok(true) => report.passed += 1,
            Ok(false) => report.failed.push(FailedCondition { formula: formula.to_string(), reason: None }),
            Err(e) => report.failed.push(FailedCondition { formula: formula.to_string(), reason: Some(e.to_string()) }),
        }
    }
    report
}
