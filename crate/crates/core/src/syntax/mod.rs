//! Concepts, TBoxes and constraints: AST, parser, printer and normal forms.

pub mod alcp;
pub mod ast;
pub mod nnf;
pub mod parse;
pub mod print;
pub mod semantics;
pub mod sexp;

use thiserror::Error;

pub use alcp::{parse_alcp_problem, translate_alcp, AlcpError, AlcpProblem};
pub use ast::{Axiom, Concept, Constraint, Name, Problem, RolePath, TBox, Term};
pub use nnf::{eliminate_constraint_negation, to_nnf, FreshNames};
pub use parse::{parse_concept_str, parse_constraint_str, parse_problem};
pub use print::{concept_to_string, constraint_to_string, problem_to_string};
pub use semantics::Interpretation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}
