//! Interpolant automata: generalizing one infeasibility proof to a set of
//! traces.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use thiserror::Error;

use crate::automata::format::serialize_annotated;
use crate::automata::nfa::{Nfa, StateId};
use crate::lang::expr::Operation;
use crate::logic::{hoare_valid, implies, strongest_post, Predicate, SolverConfig};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InterpolantError {
    #[error("expected {expected} interpolants, got {got}")]
    Length { expected: usize, got: usize },
    #[error("interpolant sequence must start with true and end with false")]
    Endpoints,
    #[error("{{{pre}}} {op} {{{post}}} is not a valid Hoare triple")]
    InvalidTriple {
        index: usize,
        pre: String,
        op: String,
        post: String,
    },
}

/// An automaton whose states are annotated with predicates such that every
/// edge `(P, op, Q)` is a valid Hoare triple. Its only accepting state is
/// annotated `false`, so every accepted trace is infeasible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolantAutomaton {
    pub nfa: Nfa,
    pub annotations: Vec<Predicate>,
}

impl InterpolantAutomaton {
    pub fn predicate(&self, q: StateId) -> &Predicate {
        &self.annotations[q]
    }

    /// Text format with one `annot` line per state.
    pub fn serialize(&self) -> String {
        let annots: BTreeMap<StateId, String> = self
            .annotations
            .iter()
            .enumerate()
            .map(|(q, p)| (q, p.to_string()))
            .collect();
        serialize_annotated(&self.nfa, &annots)
    }

    /// Re-checks every edge as a Hoare triple; returns the offending edges.
    pub fn invalid_edges(&self, cfg: &SolverConfig) -> Vec<usize> {
        self.nfa
            .transitions()
            .iter()
            .enumerate()
            .filter(|(_, t)| {
                !hoare_valid(&self.annotations[t.from], &t.op, &self.annotations[t.to], cfg)
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Builds the interpolant automaton for `trace`.
///
/// States are the distinct predicates of the sequence. Besides the edges
/// along the trace, an edge `(P, op, Q)` is added for every operation
/// labelling a transition of `abstraction` whenever `sp(P, op) ⇒ Q`. The
/// `false` state gets no outgoing generalization edges, and the `true`
/// state receives no edges except self-loops.
pub fn build_interpolant_automaton(
    trace: &[Operation],
    interpolants: &[Predicate],
    abstraction: &Nfa,
    cfg: &SolverConfig,
) -> Result<InterpolantAutomaton, InterpolantError> {
    if interpolants.len() != trace.len() + 1 {
        return Err(InterpolantError::Length {
            expected: trace.len() + 1,
            got: interpolants.len(),
        });
    }
    if !interpolants[0].is_true() || !interpolants[trace.len()].is_false() {
        return Err(InterpolantError::Endpoints);
    }
    for (i, op) in trace.iter().enumerate() {
        if !hoare_valid(&interpolants[i], op, &interpolants[i + 1], cfg) {
            return Err(InterpolantError::InvalidTriple {
                index: i,
                pre: interpolants[i].to_string(),
                op: op.text().to_string(),
                post: interpolants[i + 1].to_string(),
            });
        }
    }

    let mut annotations: Vec<Predicate> = Vec::new();
    let mut state_of = Vec::with_capacity(interpolants.len());
    for p in interpolants {
        let q = match annotations.iter().position(|a| a == p) {
            Some(q) => q,
            None => {
                annotations.push(p.clone());
                annotations.len() - 1
            }
        };
        state_of.push(q);
    }
    let truth = state_of[0];
    let falsity = state_of[trace.len()];

    let mut nfa = Nfa::new("q0");
    for q in 1..annotations.len() {
        nfa.add_state(&format!("q{q}"), false);
    }
    nfa.set_accepting(falsity, true);

    let mut edges: HashSet<(StateId, &str, StateId)> = HashSet::new();
    for (i, op) in trace.iter().enumerate() {
        let (p, q) = (state_of[i], state_of[i + 1]);
        if edges.insert((p, op.text(), q)) {
            nfa.add_transition(p, op.clone(), q);
        }
    }

    let candidates: BTreeSet<&Operation> = abstraction.transitions().iter().map(|t| &t.op).collect();
    for op in candidates {
        for p in 0..annotations.len() {
            if p == falsity {
                continue;
            }
            let post = strongest_post(&annotations[p], op, cfg).pred;
            for (q, target) in annotations.iter().enumerate() {
                if (q == truth && p != truth) || edges.contains(&(p, op.text(), q)) {
                    continue;
                }
                if implies(&post, target, cfg) {
                    edges.insert((p, op.text(), q));
                    nfa.add_transition(p, op.clone(), q);
                }
            }
        }
    }

    Ok(InterpolantAutomaton { nfa, annotations })
}
