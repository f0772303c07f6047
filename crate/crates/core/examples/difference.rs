//! One refinement step by hand: subtract an interpolant automaton from the
//! program automaton and look at what is left.

use std::sync::Arc;

use partrace::automata::format::serialize;
use partrace::engine::parallel::worker::{worker_run, WorkItem};
use partrace::feasibility::BuiltinBackend;
use partrace::lang::compile;
use partrace::logic::SolverConfig;

fn main() {
    let a = compile(include_str!("programs/notzero.imp")).unwrap().trim();
    println!("{}", serialize(&a));

    let mut abstraction = a;
    while let Some(trace) = abstraction.shortest_accepted() {
        let item = WorkItem { seq: 0, trace: trace.clone(), snapshot: Arc::new(abstraction.clone()) };
        let r = worker_run(&item, 0, &BuiltinBackend::default(), &SolverConfig::default());
        println!("{trace}: {}", r.verdict.label());
        if r.automaton.is_empty() {
            break;
        }
        abstraction = abstraction.difference(&r.automaton);
        println!("  abstraction now has {} states", abstraction.count_states());
    }
    println!("language empty: {}", abstraction.is_empty());
}
