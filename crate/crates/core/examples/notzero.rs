//! Verifies the NotZero program with the sequential engine and with a pool
//! of two workers, printing the event log of the parallel run.
//!
//!     cargo run --example notzero [-- path/to/program.imp]

use std::sync::Arc;

use partrace::engine::{verify, EventLog, Limits};
use partrace::feasibility::BuiltinBackend;
use partrace::lang::compile;

fn main() {
    let source = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable program"),
        None => include_str!("programs/notzero.imp").to_string(),
    };
    let program = compile(&source).expect("program parses");
    let backend = Arc::new(BuiltinBackend::default());

    let seq = verify(&program, 0, backend.clone(), &Limits::default(), &mut EventLog::discard());
    println!("sequential: {} after {} refinements", seq.outcome, seq.stats.refinements);

    let mut log = EventLog::in_memory();
    let par = verify(&program, 2, backend, &Limits::default(), &mut log);
    println!("two workers: {} after {} refinements", par.outcome, par.stats.refinements);
    for e in log.events() {
        let who = e.worker.map_or("-".to_string(), |w| w.to_string());
        println!(
            "  {:>7} worker {who} states {:>2}  {}",
            e.event,
            e.abstraction_states,
            e.trace.as_deref().or(e.detail.as_deref()).unwrap_or("")
        );
    }
}
