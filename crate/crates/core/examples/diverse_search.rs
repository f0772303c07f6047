//! How the coordinator picks traces: breadth-first for the first one, then
//! traces that diverge as early as possible from those already handed out.

use partrace::automata::Trace;
use partrace::engine::parallel::diverse_search;
use partrace::lang::compile;

fn main() {
    let a = compile(include_str!("programs/notzero.imp")).unwrap().trim();
    let mut picked: Vec<Trace> = Vec::new();
    for round in 1..=4 {
        let relevant: Vec<&Trace> = picked.iter().collect();
        match diverse_search(&a, a.initial(), &Trace::default(), &relevant, None) {
            Ok(Some(t)) => {
                println!("pick {round}: {t}");
                picked.push(t);
            }
            Ok(None) => println!("pick {round}: nothing new"),
            Err(_) => println!("pick {round}: out of budget"),
        }
    }
}
