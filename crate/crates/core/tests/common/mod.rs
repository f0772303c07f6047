//! Random automata, random traces and brute-force language enumeration,
//! shared by the oracle tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use partrace::automata::{Nfa, Trace};
use partrace::interp::{replay, Store};
use partrace::lang::{Operation, Var};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn letters(n: usize) -> Vec<Operation> {
    (0..n).map(|i| format!("x>{i}").parse::<Trace>().unwrap()[0].clone()).collect()
}

/// An automaton with 1..=`max_states` states over a random non-empty
/// subset of `alphabet`.
pub fn random_nfa(rng: &mut StdRng, max_states: usize, alphabet: &[Operation]) -> Nfa {
    let n = rng.gen_range(1..=max_states);
    let mut a = Nfa::new("s0");
    a.set_accepting(0, rng.gen_bool(0.3));
    for q in 1..n {
        a.add_state(&format!("s{q}"), rng.gen_bool(0.4));
    }
    let k = rng.gen_range(1..=alphabet.len());
    let used: Vec<&Operation> = alphabet.choose_multiple(rng, k).collect();
    a.extend_alphabet(used.iter().map(|op| (*op).clone()));
    let density = rng.gen_range(0.15..0.5);
    for from in 0..n {
        for op in &used {
            for to in 0..n {
                if rng.gen_bool(density) {
                    a.add_transition(from, (*op).clone(), to);
                }
            }
        }
    }
    a
}

fn step(a: &Nfa, from: &BTreeSet<usize>, op: &Operation) -> BTreeSet<usize> {
    from.iter()
        .flat_map(|&q| a.out(q))
        .filter(|t| &t.op == op)
        .map(|t| t.to)
        .collect()
}

/// Calls `visit` with every word over `alphabet` of length at most
/// `max_len` on which some automaton still has a run, and whether each
/// automaton accepts it.
pub fn enumerate_words(
    automata: &[&Nfa],
    alphabet: &[Operation],
    max_len: usize,
    visit: &mut dyn FnMut(&[Operation], &[bool]),
) {
    fn go(
        automata: &[&Nfa],
        alphabet: &[Operation],
        left: usize,
        word: &mut Vec<Operation>,
        sets: Vec<BTreeSet<usize>>,
        visit: &mut dyn FnMut(&[Operation], &[bool]),
    ) {
        let acc: Vec<bool> = automata
            .iter()
            .zip(&sets)
            .map(|(a, s)| s.iter().any(|&q| a.is_accepting(q)))
            .collect();
        visit(word, &acc);
        // Once every automaton is stuck, no extension is accepted anywhere.
        if left == 0 || sets.iter().all(BTreeSet::is_empty) {
            return;
        }
        for op in alphabet {
            let next: Vec<BTreeSet<usize>> =
                automata.iter().zip(&sets).map(|(a, s)| step(a, s, op)).collect();
            word.push(op.clone());
            go(automata, alphabet, left - 1, word, next, visit);
            word.pop();
        }
    }
    let start = automata.iter().map(|a| BTreeSet::from([a.initial()])).collect();
    go(automata, alphabet, max_len, &mut Vec::new(), start, visit);
}

pub const VARS: [&str; 3] = ["x", "y", "z"];

fn term(coef: i64, v: &str, first: bool) -> String {
    let sign = if coef < 0 { "-" } else if first { "" } else { "+" };
    match coef.abs() {
        1 => format!("{sign}{v}"),
        c => format!("{sign}{c}*{v}"),
    }
}

fn constant(c: i64) -> String {
    if c < 0 { format!("{c}") } else { format!("+{c}") }
}

/// A random trace over the first `k` of x, y, z: assumptions of one or two
/// terms against a small constant, and assignments of one term plus a
/// constant.
pub fn random_trace(rng: &mut StdRng, k: usize, max_len: usize) -> Trace {
    let len = rng.gen_range(1..=max_len);
    let coef = |rng: &mut StdRng| *[-2, -1, 1, 2].choose(rng).unwrap();
    let ops: Vec<String> = (0..len)
        .map(|_| {
            let v = VARS[rng.gen_range(0..k)];
            let w = VARS[rng.gen_range(0..k)];
            if rng.gen_bool(0.6) {
                let mut lhs = term(coef(rng), v, true);
                if w != v && rng.gen_bool(0.5) {
                    lhs += &term(coef(rng), w, false);
                }
                let cmp = ["<", "<=", ">", ">=", "==", "!="].choose(rng).unwrap();
                format!("{lhs}{cmp}{}", rng.gen_range(-5..=5))
            } else {
                format!("{v}={}{};", term(coef(rng), w, true), constant(rng.gen_range(-5..=5)))
            }
        })
        .collect();
    ops.join(", ").parse().unwrap()
}

/// Whether some initial state in `[-r, r]^k` drives the trace to its end.
pub fn feasible_in_box(trace: &Trace, k: usize, r: i64) -> bool {
    let vars: Vec<Var> = VARS[..k].iter().map(|v| Var::new(v)).collect();
    let mut values = vec![-r; k];
    loop {
        let store: Store = vars
            .iter()
            .cloned()
            .zip(values.iter().map(|&v| BigInt::from(v)))
            .collect();
        if replay(trace, &store, &[]).is_some() {
            return true;
        }
        let mut i = 0;
        loop {
            if i == k {
                return false;
            }
            values[i] += 1;
            if values[i] <= r {
                break;
            }
            values[i] = -r;
            i += 1;
        }
    }
}
