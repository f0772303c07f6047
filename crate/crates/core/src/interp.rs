//! Concrete semantics: evaluating expressions, replaying traces and
//! random executions of program automata.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::Rng;

use crate::automata::nfa::{Nfa, StateId};
use crate::lang::expr::{ArithOp, Expr, OpKind, Operation, Var};

/// Values of program variables. Missing variables read as zero.
pub type Store = BTreeMap<Var, BigInt>;

pub fn eval_arith(e: &Expr, s: &Store) -> BigInt {
    match e {
        Expr::Int(v) => v.clone(),
        Expr::Var(v) => s.get(v).cloned().unwrap_or_default(),
        Expr::Neg(e) => -eval_arith(e, s),
        Expr::Arith(op, l, r) => {
            let (l, r) = (eval_arith(l, s), eval_arith(r, s));
            match op {
                ArithOp::Add => l + r,
                ArithOp::Sub => l - r,
                ArithOp::Mul => l * r,
            }
        }
        _ => panic!("condition in arithmetic position: {e}"),
    }
}

pub fn eval_cond(e: &Expr, s: &Store) -> bool {
    match e {
        Expr::Bool(b) => *b,
        Expr::Cmp(op, l, r) => op.holds(&eval_arith(l, s), &eval_arith(r, s)),
        Expr::Not(e) => !eval_cond(e, s),
        Expr::And(l, r) => eval_cond(l, s) && eval_cond(r, s),
        Expr::Or(l, r) => eval_cond(l, s) || eval_cond(r, s),
        _ => panic!("arithmetic in condition position: {e}"),
    }
}

/// Executes one operation in place. Returns false if an assume blocks.
/// Havocs draw their value from `havoc`.
pub fn step(op: &Operation, s: &mut Store, havoc: &mut impl FnMut(&Var) -> BigInt) -> bool {
    match op.kind() {
        OpKind::Assume(c) => eval_cond(c, s),
        OpKind::Assign(x, e) => {
            let v = eval_arith(e, s);
            s.insert(x.clone(), v);
            true
        }
        OpKind::Havoc(x) => {
            let v = havoc(x);
            s.insert(x.clone(), v);
            true
        }
    }
}

/// Runs `trace` from `initial`, taking havoc values in order (zero once
/// exhausted). `None` if some assume blocks.
pub fn replay(trace: &[Operation], initial: &Store, havocs: &[BigInt]) -> Option<Store> {
    let mut s = initial.clone();
    let mut values = havocs.iter();
    for op in trace {
        if !step(op, &mut s, &mut |_| values.next().cloned().unwrap_or_default()) {
            return None;
        }
    }
    Some(s)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunOutcome {
    /// An accepting state was entered after this many steps.
    Error { state: StateId, steps: usize },
    /// No transition was enabled.
    Stuck { state: StateId, steps: usize },
    StepLimit,
}

/// One random execution: at each state a uniformly chosen enabled
/// transition is taken; havocs draw from `havoc_range`.
pub fn random_run(
    a: &Nfa,
    initial: &Store,
    rng: &mut impl Rng,
    havoc_range: (i64, i64),
    max_steps: usize,
) -> RunOutcome {
    let mut s = initial.clone();
    let mut q = a.initial();
    for steps in 0..max_steps {
        if a.is_accepting(q) {
            return RunOutcome::Error { state: q, steps };
        }
        let enabled: Vec<_> = a
            .out(q)
            .filter(|t| match t.op.kind() {
                OpKind::Assume(c) => eval_cond(c, &s),
                _ => true,
            })
            .collect();
        if enabled.is_empty() {
            return RunOutcome::Stuck { state: q, steps };
        }
        let t = enabled[rng.gen_range(0..enabled.len())];
        step(&t.op, &mut s, &mut |_| {
            BigInt::from(rng.gen_range(havoc_range.0..=havoc_range.1))
        });
        q = t.to;
    }
    if a.is_accepting(q) {
        RunOutcome::Error {
            state: q,
            steps: max_steps,
        }
    } else {
        RunOutcome::StepLimit
    }
}
