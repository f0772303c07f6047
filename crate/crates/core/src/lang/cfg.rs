//! Program automaton construction.
//!
//! Every statement gets a location `lK`, numbered in pre-order; the
//! location after the last statement is `lN`. A failing assert at `lK`
//! leads to its own error location `lK_err`.

use super::expr::{Expr, Operation};
use super::parser::{Program, Stmt};
use crate::automata::nfa::{Nfa, StateId};

fn size(s: &Stmt) -> usize {
    1 + match s {
        Stmt::If(_, t, e) => block_size(t) + e.as_deref().map_or(0, block_size),
        Stmt::While(_, b) => block_size(b),
        _ => 0,
    }
}

fn block_size(b: &[Stmt]) -> usize {
    b.iter().map(size).sum()
}

fn assume(c: &Expr) -> Operation {
    Operation::assume(c.clone())
}

fn assume_not(c: &Expr) -> Operation {
    Operation::assume(Expr::negation(c.clone()))
}

/// Emits the edges of `block`, whose first statement sits at location
/// `base`; control leaves the block to `cont`.
fn emit(a: &mut Nfa, block: &[Stmt], base: StateId, cont: StateId) {
    let mut here = base;
    for (i, s) in block.iter().enumerate() {
        let next = if i + 1 == block.len() { cont } else { here + size(s) };
        match s {
            Stmt::Assign(x, e) => a.add_transition(here, Operation::assign(x.name(), e.clone()), next),
            Stmt::Havoc(x) => a.add_transition(here, Operation::havoc(x.name()), next),
            Stmt::Assume(c) => a.add_transition(here, assume(c), next),
            Stmt::Assert(c) => {
                a.add_transition(here, assume(c), next);
                let err = a.add_state(&format!("l{here}_err"), true);
                a.add_transition(here, assume_not(c), err);
            }
            Stmt::If(c, then, els) => {
                let then_entry = if then.is_empty() { next } else { here + 1 };
                a.add_transition(here, assume(c), then_entry);
                let els = els.as_deref().unwrap_or(&[]);
                let else_base = here + 1 + block_size(then);
                let else_entry = if els.is_empty() { next } else { else_base };
                a.add_transition(here, assume_not(c), else_entry);
                emit(a, then, here + 1, next);
                emit(a, els, else_base, next);
            }
            Stmt::While(c, body) => {
                let body_entry = if body.is_empty() { here } else { here + 1 };
                a.add_transition(here, assume(c), body_entry);
                a.add_transition(here, assume_not(c), next);
                emit(a, body, here + 1, here);
            }
        }
        here += size(s);
    }
}

/// Builds the program automaton; its accepting states are the error
/// locations of the asserts. No trimming is applied.
pub fn build_program_automaton(program: &Program) -> Nfa {
    let n = block_size(&program.body);
    let mut a = Nfa::new("l0");
    for k in 1..=n {
        a.add_state(&format!("l{k}"), false);
    }
    emit(&mut a, &program.body, 0, n);
    a
}
