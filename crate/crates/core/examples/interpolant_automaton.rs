//! Turns one infeasibility proof into an automaton that also covers every
//! unrolling of the loop in NotZero.

use partrace::automata::Trace;
use partrace::feasibility::{interpolate, simplify_interpolants};
use partrace::interpolant::build_interpolant_automaton;
use partrace::lang::compile;
use partrace::logic::SolverConfig;

fn main() {
    let cfg = SolverConfig::default();
    let program = compile(include_str!("programs/notzero.imp")).unwrap();
    let trace: Trace = "!(x>0), !(x>-10), !(x!=0)".parse().unwrap();

    let raw = interpolate(&trace, &cfg).expect("trace is infeasible");
    let simple = simplify_interpolants(&trace, raw.clone(), &cfg);
    let show = |seq: &[partrace::logic::Predicate]| {
        seq.iter().map(ToString::to_string).collect::<Vec<_>>().join("  |  ")
    };
    println!("interpolants: {}", show(&raw));
    println!("simplified:   {}", show(&simple));

    let ia = build_interpolant_automaton(&trace, &raw, &program, &cfg).unwrap();
    println!("\n{}", ia.serialize());
    let unrolled: Trace = "!(x>0), x>-10, x=x-1;, x>-10, x=x-1;, !(x>-10), !(x!=0)".parse().unwrap();
    println!("accepts two unrollings: {}", ia.nfa.accepts(&unrolled));
}
