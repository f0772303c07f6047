//! The input language: expressions, parser and control-flow automaton.

pub mod cfg;
pub mod expr;
pub mod parser;

pub use cfg::build_program_automaton;
pub use expr::{Expr, OpKind, Operation, Var};
pub use parser::{parse_program, ParseError, Program, Stmt};

use crate::automata::Nfa;

/// Parses a program and builds its automaton in one go.
pub fn compile(source: &str) -> Result<Nfa, ParseError> {
    parse_program(source).map(|p| build_program_automaton(&p))
}
