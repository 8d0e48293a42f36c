//! Implementation restrictions layered on top of the grammar.

use std::fmt;

use super::ast::*;

/// Functions that may follow an operation (`response_body(..).length`).
pub const KNOWN_FUNCTIONS: &[&str] = &["length"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// A request inside a formula uses a method other than GET.
    NonPureOperation { method: Method },
    /// `this` used as a quantifier collection or inside a block parameter.
    ThisOutsideComparison,
    /// A `{a.b.c}` block parameter deeper than one property access.
    DepthTwoBlockParameter { path: String },
    /// A dotted term deeper than one property access.
    DepthTwoParam { path: String },
    /// Quantifier inside a quantifier. The AST cannot express it; kept so
    /// callers can match exhaustively on every restriction.
    NestedQuantifier,
    UnknownFunction { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonPureOperation { method } => {
                write!(f, "only GET requests may appear in formulas, found {method}")
            }
            Violation::ThisOutsideComparison => f.write_str("'this' may only appear as a comparison term"),
            Violation::DepthTwoBlockParameter { path } => {
                write!(f, "block parameter '{{{path}}}' is deeper than one property access")
            }
            Violation::DepthTwoParam { path } => write!(f, "parameter '{path}' is deeper than one property access"),
            Violation::NestedQuantifier => f.write_str("nested quantifiers are not supported"),
            Violation::UnknownFunction { name } => write!(f, "unknown function '{name}'"),
        }
    }
}

/// Returns every restriction the formula breaks, in source order.
pub fn check_restrictions(formula: &Formula) -> Vec<Violation> {
    let mut out = Vec::new();
    match formula {
        Formula::Quantified(q) => {
            check_op(q.collection.operation(), false, &mut out);
            check_expression(&q.body, &mut out);
        }
        Formula::Boolean(b) => check_expression(b, &mut out),
    }
    out
}

fn check_expression(expr: &BooleanExpression, out: &mut Vec<Violation>) {
    match expr {
        BooleanExpression::Binary { lhs, rhs, .. } => {
            check_expression(lhs, out);
            check_expression(rhs, out);
        }
        BooleanExpression::Clause(Clause::Comparison(c)) => {
            for term in [&c.lhs, &c.rhs] {
                match term {
                    Term::Op(op) | Term::Previous(op) => check_op(op, true, out),
                    Term::Param(path) if path.len() > 2 => {
                        out.push(Violation::DepthTwoParam { path: path.join(".") })
                    }
                    Term::Param(_) | Term::Int(_) => {}
                }
            }
        }
        BooleanExpression::Clause(_) => {}
    }
}

fn check_op(op: &OperationRef, this_allowed: bool, out: &mut Vec<Violation>) {
    if let Some(name) = &op.function {
        if !KNOWN_FUNCTIONS.contains(&name.as_str()) {
            out.push(Violation::UnknownFunction { name: name.clone() });
        }
    }
    let req = match &op.target {
        Target::This => {
            if !this_allowed {
                out.push(Violation::ThisOutsideComparison);
            }
            return;
        }
        Target::Request(req) => req,
    };
    if req.method != Method::Get {
        out.push(Violation::NonPureOperation { method: req.method });
    }
    for block in req.segments.iter().flatten() {
        match block {
            Block::Placeholder(BlockParameter::Name(path)) if path.len() > 2 => {
                out.push(Violation::DepthTwoBlockParameter { path: path.join(".") })
            }
            Block::Placeholder(BlockParameter::NestedOp(inner) | BlockParameter::NestedPrevious(inner)) => {
                check_op(inner, false, out)
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apostl::parse_formula;

    fn violations(text: &str) -> Vec<Violation> {
        check_restrictions(&parse_formula(text).unwrap())
    }

    #[test]
    fn accepts_typical_contracts() {
        assert!(violations("response_code(GET /players/{playerNIF}) == 404").is_empty());
        assert!(violations("response_body(this) == request_body(this)").is_empty());
        assert!(violations(
            "for t in response_body(GET /tournaments) :- \
             response_body(GET /tournaments/{t.tournamentId}/enrollments).length <= t.capacity"
        )
        .is_empty());
    }

    #[test]
    fn rejects_impure_requests() {
        assert_eq!(
            violations("response_code(DELETE /players/{p}) == 200"),
            vec![Violation::NonPureOperation { method: Method::Delete }]
        );
        let nested = violations("response_code(GET /a/{response_body(POST /b).length}) == 200");
        assert_eq!(nested, vec![Violation::NonPureOperation { method: Method::Post }]);
    }

    #[test]
    fn rejects_depth_two_block_parameter() {
        let v = violations(
            "for p in request_body(GET /players) :- \
             response_code(GET /players/{p.playerNIF.tournaments}) == 200",
        );
        assert_eq!(v, vec![Violation::DepthTwoBlockParameter { path: "p.playerNIF.tournaments".into() }]);
    }

    #[test]
    fn rejects_this_outside_comparisons() {
        assert_eq!(violations("for x in response_body(this) :- T"), vec![Violation::ThisOutsideComparison]);
        assert_eq!(
            violations("response_code(GET /a/{response_body(this)}) == 200"),
            vec![Violation::ThisOutsideComparison]
        );
    }

    #[test]
    fn rejects_unknown_functions_and_deep_params() {
        assert_eq!(
            violations("response_body(GET /a).size == 1"),
            vec![Violation::UnknownFunction { name: "size".into() }]
        );
        assert_eq!(violations("a.b.c == 1"), vec![Violation::DepthTwoParam { path: "a.b.c".into() }]);
    }
}
