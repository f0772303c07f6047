//! The plain refinement loop: take the shortest remaining error trace,
//! check it, subtract its interpolant automaton, repeat.

use std::sync::Arc;
use std::time::Instant;

use super::parallel::worker::{worker_run, WorkItem, WorkVerdict};
use super::{EventLog, Iteration, Limits, Outcome, RunStats, Verdict};
use crate::automata::Nfa;
use crate::feasibility::Backend;

pub fn verify_sequential(
    program: &Nfa,
    backend: &dyn Backend,
    limits: &Limits,
    log: &mut EventLog,
) -> Verdict {
    let start = Instant::now();
    log.restart_clock();
    let deadline = limits.deadline(start);
    let mut stats = RunStats {
        worker_busy: vec![Default::default()],
        ..RunStats::default()
    };
    let mut a = Arc::new(program.trim());

    let outcome = loop {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break Outcome::Unknown("timeout".into());
        }
        let Some(trace) = a.shortest_accepted() else {
            break Outcome::Safe;
        };
        if stats.refinements >= limits.max_refinements {
            break Outcome::Unknown("max-refinements".into());
        }
        let seq = stats.traces_checked as u64;
        stats.traces_checked += 1;
        stats.checked.push(trace.clone());
        log.record("assign", Some(0), Some(seq), Some(&trace), a.count_states(), None);
        let item = WorkItem {
            seq,
            trace,
            snapshot: Arc::clone(&a),
        };
        let r = worker_run(&item, 0, backend, &limits.solver);
        stats.worker_busy[0] += r.busy;
        if r.verdict == WorkVerdict::Unsat {
            a = Arc::new(a.difference(&r.automaton));
            stats.refinements += 1;
        }
        stats.iterations.push(Iteration {
            trace_len: r.trace.len(),
            result: r.verdict.label(),
            abstraction_states: a.count_states(),
        });
        log.record(
            "result",
            Some(0),
            Some(seq),
            Some(&r.trace),
            a.count_states(),
            Some(r.verdict.label().into()),
        );
        match r.verdict {
            WorkVerdict::Sat(witness) => {
                break Outcome::Unsafe {
                    trace: r.trace,
                    witness,
                }
            }
            WorkVerdict::Unknown(reason) => break Outcome::Unknown(reason),
            WorkVerdict::Unsat => {}
        }
    };

    stats.wall_time = start.elapsed();
    stats.final_abstraction_states = a.count_states();
    log.record("verdict", None, None, None, a.count_states(), Some(outcome.to_string()));
    Verdict { outcome, stats }
}
