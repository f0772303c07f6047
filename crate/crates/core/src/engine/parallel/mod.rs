//! The coordinator: hands traces to workers, refines the abstraction with
//! whatever comes back.
//!
//! The coordinator is the only owner of the abstraction. Each work item
//! carries a shared immutable snapshot of it; a worker building its
//! interpolant automaton against an outdated snapshot is still sound.

pub mod executor;
pub mod search;
pub mod worker;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use self::executor::{Executor, ThreadPool};
use self::search::select_next;
use self::worker::{WorkItem, WorkResult, WorkVerdict};
use super::{EventLog, Iteration, Limits, Outcome, RunStats, Verdict};
use crate::automata::{Nfa, Trace};
use crate::feasibility::Backend;

pub use executor::SyncExecutor;
pub use search::{diverse_search, BudgetExceeded};
pub use worker::worker_run;

/// Runs the coordinator over a fresh thread pool of `workers` threads.
pub fn verify_parallel(
    program: &Nfa,
    workers: usize,
    backend: Arc<dyn Backend>,
    limits: &Limits,
    log: &mut EventLog,
) -> Verdict {
    let mut pool = ThreadPool::new(workers, backend, limits.solver);
    verify_parallel_with(program, &mut pool, limits, log)
}

struct Coordinator<'a> {
    abstraction: Arc<Nfa>,
    /// Traces handed out whose results have not been processed.
    assigned: BTreeSet<Trace>,
    /// Traces whose check ended without a verdict.
    unresolved: BTreeSet<Trace>,
    outstanding: usize,
    next_seq: u64,
    stats: RunStats,
    log: &'a mut EventLog,
}

enum Selection {
    Found(Trace),
    /// The search finished without finding a fresh trace.
    Exhausted,
    OverBudget,
}

impl Coordinator<'_> {
    fn size(&self) -> usize {
        self.abstraction.count_states()
    }

    fn select(&self, first_in_phase: bool, deadline: Option<Instant>) -> Selection {
        let exclude: BTreeSet<Trace> = self.assigned.union(&self.unresolved).cloned().collect();
        match select_next(&self.abstraction, &exclude, first_in_phase, deadline) {
            Ok(Some(t)) => Selection::Found(t),
            Ok(None) => Selection::Exhausted,
            Err(_) => Selection::OverBudget,
        }
    }

    fn assign(&mut self, exec: &mut dyn Executor, trace: Trace) {
        let seq = self.next_seq;
        self.next_seq += 1;
        let item = WorkItem {
            seq,
            trace: trace.clone(),
            snapshot: Arc::clone(&self.abstraction),
        };
        let worker = exec.submit(item);
        let size = self.size();
        self.log.record("assign", worker, Some(seq), Some(&trace), size, None);
        self.stats.traces_checked += 1;
        self.stats.checked.push(trace.clone());
        self.assigned.insert(trace);
        self.outstanding += 1;
    }

    /// Applies one result. Returns the verdict if it settles the run.
    fn process(&mut self, r: WorkResult) -> Option<Outcome> {
        self.outstanding -= 1;
        self.assigned.remove(&r.trace);
        if let Some(b) = self.stats.worker_busy.get_mut(r.worker) {
            *b += r.busy;
        }
        match &r.verdict {
            WorkVerdict::Unsat => {
                if !self.abstraction.accepts(&r.trace) {
                    self.stats.wasted_results += 1;
                }
                self.abstraction = Arc::new(self.abstraction.difference(&r.automaton));
                self.stats.refinements += 1;
            }
            WorkVerdict::Unknown(_) => {
                self.unresolved.insert(r.trace.clone());
            }
            WorkVerdict::Sat(_) => {}
        }
        let size = self.size();
        self.stats.iterations.push(Iteration {
            trace_len: r.trace.len(),
            result: r.verdict.label(),
            abstraction_states: size,
        });
        self.log.record(
            "result",
            Some(r.worker),
            Some(r.seq),
            Some(&r.trace),
            size,
            Some(r.verdict.label().into()),
        );
        match r.verdict {
            WorkVerdict::Sat(witness) => Some(Outcome::Unsafe {
                trace: r.trace,
                witness,
            }),
            _ => None,
        }
    }
}

fn earliest(a: Option<Instant>, b: Option<Instant>) -> Option<Instant> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// The coordinator loop over any executor.
///
/// Each round: report SAFE once the abstraction is empty and nothing is in
/// flight; fill idle workers with fresh traces (breadth-first for the first
/// pick, diverse search afterwards, each pick within the search budget);
/// block until a result arrives; drain every available result in sequence
/// order, stopping at the first feasible trace.
pub fn verify_parallel_with(
    program: &Nfa,
    exec: &mut dyn Executor,
    limits: &Limits,
    log: &mut EventLog,
) -> Verdict {
    let start = Instant::now();
    log.restart_clock();
    let deadline = limits.deadline(start);
    let mut c = Coordinator {
        abstraction: Arc::new(program.trim()),
        assigned: BTreeSet::new(),
        unresolved: BTreeSet::new(),
        outstanding: 0,
        next_seq: 0,
        stats: RunStats {
            worker_busy: vec![Duration::ZERO; exec.pool_size()],
            ..RunStats::default()
        },
        log,
    };
    let outcome = 'run: loop {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break Outcome::Unknown("timeout".into());
        }
        // SAFE only once every handed-out trace has come back; results
        // still in flight are drained first.
        let empty = c.abstraction.is_empty();
        if empty && c.outstanding == 0 {
            break Outcome::Safe;
        }
        if c.stats.refinements >= limits.max_refinements {
            break Outcome::Unknown("max-refinements".into());
        }

        let mut first = true;
        let mut over_budget = false;
        while !empty && c.outstanding < exec.pool_size() {
            let budget = earliest(Some(Instant::now() + limits.search_budget), deadline);
            match c.select(first, budget) {
                Selection::Found(t) => c.assign(exec, t),
                Selection::Exhausted => break,
                Selection::OverBudget => {
                    over_budget = true;
                    break;
                }
            }
            first = false;
        }

        if c.outstanding == 0 {
            // Nothing in flight and nothing fresh found. If the search was
            // cut short, search again with only the global deadline.
            if over_budget {
                match c.select(false, deadline) {
                    Selection::Found(t) => c.assign(exec, t),
                    Selection::OverBudget => break Outcome::Unknown("timeout".into()),
                    Selection::Exhausted => break Outcome::Unknown("unresolved-traces".into()),
                }
            } else {
                break Outcome::Unknown("unresolved-traces".into());
            }
        }

        let Some(first_result) = exec.wait(deadline) else {
            break Outcome::Unknown("timeout".into());
        };
        let mut empty_polls = 0;
        let mut batch = vec![first_result];
        loop {
            match exec.try_take() {
                Some(r) => {
                    empty_polls = 0;
                    batch.push(r);
                }
                None => {
                    empty_polls += 1;
                    c.stats.max_empty_polls = c.stats.max_empty_polls.max(empty_polls);
                    break;
                }
            }
        }
        batch.sort_by_key(|r| r.seq);
        for r in batch {
            if let Some(outcome) = c.process(r) {
                break 'run outcome;
            }
        }
    };

    let size = c.size();
    c.stats.wall_time = start.elapsed();
    c.stats.final_abstraction_states = size;
    c.log
        .record("verdict", None, None, None, size, Some(outcome.to_string()));
    Verdict {
        outcome,
        stats: c.stats,
    }
}
