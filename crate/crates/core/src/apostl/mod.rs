//! The contract language: syntax tree, parser, printer, restriction checker
//! and evaluator.

pub mod ast;
pub mod eval;
mod parser;
mod restrictions;

pub use ast::*;
pub use parser::{parse_formula, SyntaxError};
pub use restrictions::{check_restrictions, Violation, KNOWN_FUNCTIONS};
