//! Syntax tree for contract formulas.
//!
//! The shape mirrors the grammar closely: a [`Formula`] is either a single
//! quantified formula or a boolean expression, and a [`BooleanExpression`]
//! cannot contain a quantifier, so nesting is unrepresentable.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    Quantified(QuantifiedFormula),
    Boolean(BooleanExpression),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantifier {
    ForAll,
    Exists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifiedFormula {
    pub quantifier: Quantifier,
    pub variable: String,
    pub collection: Call,
    pub body: BooleanExpression,
}

/// The collection of a quantified formula: an operation, optionally read
/// from the pre-request snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Call {
    Op(OperationRef),
    Previous(OperationRef),
}

impl Call {
    pub fn operation(&self) -> &OperationRef {
        match self {
            Call::Op(op) | Call::Previous(op) => op,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Implies,
}

impl BoolOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BoolOp::And => "&&",
            BoolOp::Or => "||",
            BoolOp::Implies => "=>",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BooleanExpression {
    Binary {
        op: BoolOp,
        lhs: Box<BooleanExpression>,
        rhs: Box<BooleanExpression>,
    },
    Clause(Clause),
}

impl BooleanExpression {
    pub fn binary(op: BoolOp, lhs: BooleanExpression, rhs: BooleanExpression) -> Self {
        BooleanExpression::Binary { op, lhs: Box::new(lhs), rhs: Box::new(rhs) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clause {
    True,
    False,
    Comparison(Comparison),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

impl Comparator {
    pub fn symbol(self) -> &'static str {
        match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
            Comparator::Lt => "<",
            Comparator::Gt => ">",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Term,
    pub cmp: Comparator,
    pub rhs: Term,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    Op(OperationRef),
    Previous(OperationRef),
    /// Dotted name such as `t.capacity`.
    Param(Vec<String>),
    Int(i64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Header {
    RequestBody,
    ResponseBody,
    ResponseCode,
}

impl Header {
    pub fn keyword(self) -> &'static str {
        match self {
            Header::RequestBody => "request_body",
            Header::ResponseBody => "response_body",
            Header::ResponseCode => "response_code",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationRef {
    pub header: Header,
    pub target: Target,
    pub function: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    This,
    Request(HttpRequest),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Get,
    Post,
    Put,
    Delete,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Get => "GET",
            Method::Post => "POST",
            Method::Put => "PUT",
            Method::Delete => "DELETE",
        }
    }

    pub fn parse(text: &str) -> Option<Method> {
        match text.to_ascii_uppercase().as_str() {
            "GET" => Some(Method::Get),
            "POST" => Some(Method::Post),
            "PUT" => Some(Method::Put),
            "DELETE" => Some(Method::Delete),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HttpRequest {
    pub method: Method,
    pub segments: Vec<Segment>,
}

/// One `/`-delimited URL segment, made of `.`-separated blocks.
pub type Segment = Vec<Block>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Block {
    Literal(String),
    Placeholder(BlockParameter),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockParameter {
    Name(Vec<String>),
    NestedOp(OperationRef),
    NestedPrevious(OperationRef),
}

impl Formula {
    /// True when any term reads from the pre-request snapshot.
    pub fn uses_previous(&self) -> bool {
        let mut found = false;
        self.visit_operations(&mut |_, previous| found |= previous);
        found
    }

    /// Calls `f(op, is_previous)` for every operation reference, including
    /// those nested in block parameters.
    pub fn visit_operations(&self, f: &mut dyn FnMut(&OperationRef, bool)) {
        match self {
            Formula::Quantified(q) => {
                match &q.collection {
                    Call::Op(op) => visit_op(op, false, f),
                    Call::Previous(op) => visit_op(op, true, f),
                }
                q.body.visit_operations(f);
            }
            Formula::Boolean(b) => b.visit_operations(f),
        }
    }

    /// Replaces single-name placeholders (`{playerNIF}`) for which `lookup`
    /// returns a value. Dotted placeholders and quantifier variables are left
    /// untouched.
    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<String>) -> Formula {
        match self {
            Formula::Quantified(q) => {
                let var = q.variable.clone();
                let guarded = move |name: &str| if name == var { None } else { lookup(name) };
                Formula::Quantified(QuantifiedFormula {
                    quantifier: q.quantifier,
                    variable: q.variable.clone(),
                    collection: match &q.collection {
                        Call::Op(op) => Call::Op(op.substitute(&guarded)),
                        Call::Previous(op) => Call::Previous(op.substitute(&guarded)),
                    },
                    body: q.body.substitute(&guarded),
                })
            }
            Formula::Boolean(b) => Formula::Boolean(b.substitute(lookup)),
        }
    }

    /// Names of single-name placeholders still present.
    pub fn placeholder_names(&self) -> Vec<String> {
        let mut names = Vec::new();
        let skip = match self {
            Formula::Quantified(q) => Some(q.variable.as_str()),
            Formula::Boolean(_) => None,
        };
        self.visit_operations(&mut |op, _| {
            if let Target::Request(req) = &op.target {
                for block in req.segments.iter().flatten() {
                    if let Block::Placeholder(BlockParameter::Name(path)) = block {
                        if path.len() == 1 && Some(path[0].as_str()) != skip && !names.contains(&path[0]) {
                            names.push(path[0].clone());
                        }
                    }
                }
            }
        });
        names
    }
}

fn visit_op(op: &OperationRef, previous: bool, f: &mut dyn FnMut(&OperationRef, bool)) {
    f(op, previous);
    if let Target::Request(req) = &op.target {
        for block in req.segments.iter().flatten() {
            match block {
                Block::Placeholder(BlockParameter::NestedOp(inner)) => visit_op(inner, false, f),
                Block::Placeholder(BlockParameter::NestedPrevious(inner)) => visit_op(inner, true, f),
                _ => {}
            }
        }
    }
}

impl BooleanExpression {
    pub fn visit_operations(&self, f: &mut dyn FnMut(&OperationRef, bool)) {
        match self {
            BooleanExpression::Binary { lhs, rhs, .. } => {
                lhs.visit_operations(f);
                rhs.visit_operations(f);
            }
            BooleanExpression::Clause(Clause::Comparison(c)) => {
                for term in [&c.lhs, &c.rhs] {
                    match term {
                        Term::Op(op) => visit_op(op, false, f),
                        Term::Previous(op) => visit_op(op, true, f),
                        Term::Param(_) | Term::Int(_) => {}
                    }
                }
            }
            BooleanExpression::Clause(_) => {}
        }
    }

    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<String>) -> BooleanExpression {
        match self {
            BooleanExpression::Binary { op, lhs, rhs } => {
                BooleanExpression::binary(*op, lhs.substitute(lookup), rhs.substitute(lookup))
            }
            BooleanExpression::Clause(Clause::Comparison(c)) => {
                BooleanExpression::Clause(Clause::Comparison(Comparison {
                    lhs: c.lhs.substitute(lookup),
                    cmp: c.cmp,
                    rhs: c.rhs.substitute(lookup),
                }))
            }
            other => other.clone(),
        }
    }

    /// Replaces `{var.prop}` placeholders using `bind(prop_path)`; used when
    /// iterating the elements of a quantified collection.
    pub fn bind_variable(
        &self,
        var: &str,
        bind: &dyn Fn(&[String]) -> Option<String>,
    ) -> Result<BooleanExpression, Vec<String>> {
        let lookup_path = |path: &[String]| -> Option<Option<String>> {
            if path.first().map(String::as_str) == Some(var) {
                Some(bind(&path[1..]))
            } else {
                None
            }
        };
        let mut missing = Vec::new();
        let out = self.map_blocks(&mut |path| match lookup_path(path) {
            Some(Some(text)) => Some(text),
            Some(None) => {
                missing.push(path.join("."));
                None
            }
            None => None,
        });
        if missing.is_empty() {
            Ok(out)
        } else {
            Err(missing)
        }
    }

    fn map_blocks(&self, f: &mut dyn FnMut(&[String]) -> Option<String>) -> BooleanExpression {
        match self {
            BooleanExpression::Binary { op, lhs, rhs } => {
                let l = lhs.map_blocks(f);
                let r = rhs.map_blocks(f);
                BooleanExpression::binary(*op, l, r)
            }
            BooleanExpression::Clause(Clause::Comparison(c)) => {
                BooleanExpression::Clause(Clause::Comparison(Comparison {
                    lhs: c.lhs.map_blocks(f),
                    cmp: c.cmp,
                    rhs: c.rhs.map_blocks(f),
                }))
            }
            other => other.clone(),
        }
    }
}

impl Term {
    fn substitute(&self, lookup: &dyn Fn(&str) -> Option<String>) -> Term {
        let mut f = |path: &[String]| if path.len() == 1 { lookup(&path[0]) } else { None };
        self.map_blocks(&mut f)
    }

    fn map_blocks(&self, f: &mut dyn FnMut(&[String]) -> Option<String>) -> Term {
        match self {
            Term::Op(op) => Term::Op(op.map_blocks(f)),
            Term::Previous(op) => Term::Previous(op.map_blocks(f)),
            other => other.clone(),
        }
    }
}

impl OperationRef {
    pub fn substitute(&self, lookup: &dyn Fn(&str) -> Option<String>) -> OperationRef {
        let mut f = |path: &[String]| if path.len() == 1 { lookup(&path[0]) } else { None };
        self.map_blocks(&mut f)
    }

    fn map_blocks(&self, f: &mut dyn FnMut(&[String]) -> Option<String>) -> OperationRef {
        let target = match &self.target {
            Target::This => Target::This,
            Target::Request(req) => Target::Request(HttpRequest {
                method: req.method,
                segments: req
                    .segments
                    .iter()
                    .map(|segment| {
                        segment
                            .iter()
                            .map(|block| match block {
                                Block::Placeholder(BlockParameter::Name(path)) => match f(path) {
                                    Some(text) => Block::Literal(text),
                                    None => block.clone(),
                                },
                                Block::Placeholder(BlockParameter::NestedOp(inner)) => {
                                    Block::Placeholder(BlockParameter::NestedOp(inner.map_blocks(f)))
                                }
                                Block::Placeholder(BlockParameter::NestedPrevious(inner)) => {
                                    Block::Placeholder(BlockParameter::NestedPrevious(inner.map_blocks(f)))
                                }
                                Block::Literal(_) => block.clone(),
                            })
                            .collect()
                    })
                    .collect(),
            }),
        };
        OperationRef { header: self.header, target, function: self.function.clone() }
    }
}
