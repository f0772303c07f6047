//! Shows the SMT-LIB2 query for a trace and, if a solver is available,
//! runs it.
//!
//!     cargo run --example smtlib [-- "z3 -in"]

use std::time::Duration;

use partrace::automata::Trace;
use partrace::feasibility::{smtlib_script, Backend, SmtLibBackend};
use partrace::logic::{encode_trace, SolverConfig};

fn main() {
    let trace: Trace = "x>0, x=-x;, !(x!=0)".parse().unwrap();
    let formula = encode_trace(&trace);
    println!("{formula}\n");
    println!("{}", smtlib_script(&formula));

    let command = std::env::args().nth(1).unwrap_or_else(|| "z3 -in".into());
    let backend = SmtLibBackend::new(&command, Duration::from_secs(10), SolverConfig::default());
    match backend.check_trace(&trace) {
        Ok(r) => println!("`{command}` says {}", r.kind()),
        Err(e) => println!("could not ask `{command}`: {e}"),
    }
}
