//! Checks a few traces with the builtin backend.
//!
//!     cargo run --example feasibility [-- "x>0, x=-x;, x>0"]

use partrace::automata::Trace;
use partrace::feasibility::{Backend, BuiltinBackend, FeasibilityResult};

fn main() {
    let given: Vec<String> = std::env::args().skip(1).collect();
    let traces = if given.is_empty() {
        vec![
            "x>0, x=-x;, !(x!=0)".to_string(),
            "x>0, x=-x;, x!=0".to_string(),
            "havoc y;, x=2*y;, x==7".to_string(),
        ]
    } else {
        given
    };
    let backend = BuiltinBackend::default();
    for text in traces {
        let trace: Trace = match text.parse() {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{text}: {e}");
                continue;
            }
        };
        match backend.check_trace(&trace).expect("builtin backend does not fail") {
            FeasibilityResult::Sat(w) => println!("{trace}\n  feasible with {w}"),
            FeasibilityResult::Unsat(seq) => {
                let seq: Vec<String> = seq.iter().map(ToString::to_string).collect();
                println!("{trace}\n  infeasible: {}", seq.join(", "));
            }
            FeasibilityResult::Unknown(why) => println!("{trace}\n  unknown: {why}"),
        }
    }
}
