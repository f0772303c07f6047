//! What a worker does with one trace.

use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::automata::{Nfa, Trace};
use crate::feasibility::{Backend, FeasibilityResult, Witness};
use crate::interpolant::build_interpolant_automaton;
use crate::logic::SolverConfig;

/// A trace to check, with the abstraction current when it was handed out.
#[derive(Clone, Debug)]
pub struct WorkItem {
    pub seq: u64,
    pub trace: Trace,
    pub snapshot: Arc<Nfa>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WorkVerdict {
    Sat(Witness),
    Unsat,
    Unknown(String),
}

impl WorkVerdict {
    pub fn label(&self) -> &'static str {
        match self {
            WorkVerdict::Sat(_) => "sat",
            WorkVerdict::Unsat => "unsat",
            WorkVerdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct WorkResult {
    pub seq: u64,
    pub worker: usize,
    pub trace: Trace,
    pub verdict: WorkVerdict,
    /// The interpolant automaton, or the empty automaton unless `Unsat`.
    pub automaton: Nfa,
    pub busy: Duration,
}

/// Checks the trace and, if it is infeasible, builds its interpolant
/// automaton against the item's snapshot. Backend failures become
/// `Unknown`.
pub fn worker_run(
    item: &WorkItem,
    worker: usize,
    backend: &dyn Backend,
    solver: &SolverConfig,
) -> WorkResult {
    let start = Instant::now();
    let (verdict, automaton) = match backend.check_trace(&item.trace) {
        Ok(FeasibilityResult::Sat(w)) => (WorkVerdict::Sat(w), Nfa::empty([])),
        Ok(FeasibilityResult::Unknown(r)) => (WorkVerdict::Unknown(r), Nfa::empty([])),
        Err(e) => (WorkVerdict::Unknown(format!("backend failure: {e}")), Nfa::empty([])),
        Ok(FeasibilityResult::Unsat(seq)) => {
            match build_interpolant_automaton(&item.trace, &seq, &item.snapshot, solver) {
                Ok(ia) => (WorkVerdict::Unsat, ia.nfa),
                Err(e) => (
                    WorkVerdict::Unknown(format!("invalid interpolants: {e}")),
                    Nfa::empty([]),
                ),
            }
        }
    };
    WorkResult {
        seq: item.seq,
        worker,
        trace: item.trace.clone(),
        verdict,
        automaton,
        busy: start.elapsed(),
    }
}
