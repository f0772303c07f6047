mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use partrace::automata::format::{load_automaton, serialize};
use partrace::automata::Trace;
use partrace::bench::{gen_family, Family};
use partrace::engine::parallel::worker::{worker_run, WorkItem, WorkVerdict};
use partrace::engine::{verify, verify_sequential, EventLog, Limits, Outcome};
use partrace::feasibility::BuiltinBackend;
use partrace::interp::{random_run, RunOutcome, Store};
use partrace::lang::{compile, Var};
use partrace::logic::SolverConfig;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{enumerate_words, letters, random_nfa, random_trace};

fn family(i: u8) -> Family {
    [Family::Branches, Family::Loops, Family::Mixed][i as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn trace_text_round_trips(seed: u64, k in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let t = random_trace(&mut rng, k, 8);
        prop_assert_eq!(t.to_string().parse::<Trace>().unwrap(), t);
    }

    #[test]
    fn difference_refines_the_left_operand(seed: u64) {
        let mut rng = StdRng::seed_from_u64(seed);
        let alphabet = letters(rng.gen_range(1..=3));
        let a = random_nfa(&mut rng, 5, &alphabet);
        let b = random_nfa(&mut rng, 5, &alphabet);
        let d = a.difference(&b);
        let mut bad = 0;
        enumerate_words(&[&a, &b, &d], &alphabet, 6, &mut |_, acc| {
            if acc[2] != (acc[0] && !acc[1]) {
                bad += 1;
            }
        });
        prop_assert_eq!(bad, 0);
        prop_assert_eq!(d.is_empty(), d.shortest_accepted().is_none());
    }

    #[test]
    fn program_automata_serialize_faithfully(f: u8, n in 1usize..4, seed: u64, bug: bool) {
        let a = compile(&gen_family(family(f), n, seed, bug)).unwrap();
        let text = serialize(&a);
        let back = load_automaton(&text).unwrap();
        prop_assert_eq!(serialize(&back), text);
        prop_assert_eq!(back, a);
    }

    #[test]
    fn workers_never_refute_their_own_trace_wrongly(seed: u64, k in 1usize..=3) {
        let mut rng = StdRng::seed_from_u64(seed);
        let trace = random_trace(&mut rng, k, 6);
        let snapshot = Arc::new(partrace::automata::Nfa::straight_line(&trace));
        let item = WorkItem { seq: 0, trace: trace.clone(), snapshot };
        let r = worker_run(&item, 0, &BuiltinBackend::default(), &SolverConfig::default());
        match r.verdict {
            WorkVerdict::Unsat => prop_assert!(r.automaton.accepts(&trace)),
            _ => prop_assert!(r.automaton.is_empty()),
        }
    }
}

/// Each refinement removes the trace it was built from and never grows
/// the language.
#[test]
fn refinement_progress_and_shrinking() {
    for (i, src) in (0..6).map(|i| (i, gen_family(family(i), 2, i as u64, false))) {
        let a = compile(&src).unwrap();
        let v = verify_sequential(&a, &BuiltinBackend::default(), &Limits::default(), &mut EventLog::discard());
        assert_eq!(v.outcome, Outcome::Safe, "{i}");
        assert_eq!(v.stats.checked.len(), v.stats.refinements);
        // Replay the refinements by hand and check the invariants.
        let mut abs = a.trim();
        let alphabet: Vec<_> = abs.alphabet().iter().cloned().collect();
        for t in &v.stats.checked {
            assert!(abs.accepts(t));
            let item = WorkItem { seq: 0, trace: t.clone(), snapshot: Arc::new(abs.clone()) };
            let r = worker_run(&item, 0, &BuiltinBackend::default(), &SolverConfig::default());
            let next = abs.difference(&r.automaton);
            assert!(!next.accepts(t));
            enumerate_words(&[&abs, &next], &alphabet, 5, &mut |w, acc| {
                assert!(!acc[1] || acc[0], "language grew on {}", Trace::new(w.to_vec()));
            });
            abs = next;
        }
        assert!(abs.is_empty());
    }
}

/// Random executions of programs proven safe never reach an error.
#[test]
fn safe_verdicts_survive_random_execution() {
    let mut rng = StdRng::seed_from_u64(11);
    for i in 0..6u8 {
        let a = compile(&gen_family(family(i), 3, u64::from(i), false)).unwrap();
        let v = verify(&a, 2, Arc::new(BuiltinBackend::default()), &Limits::default(), &mut EventLog::discard());
        assert_eq!(v.outcome, Outcome::Safe);
        let vars: BTreeSet<Var> = a.transitions().iter().flat_map(|t| t.op.vars()).collect();
        for _ in 0..10_000 / 6 {
            let init: Store = vars
                .iter()
                .map(|v| (v.clone(), BigInt::from(rng.gen_range(-100..=100))))
                .collect();
            let r = random_run(&a, &init, &mut rng, (-100, 100), 500);
            assert!(!matches!(r, RunOutcome::Error { .. }), "program {i} reached an error");
        }
    }
}

/// No trace is handed out twice while its result is pending.
#[test]
fn no_duplicate_assignment() {
    for i in 0..6u8 {
        let a = compile(&gen_family(family(i), 4, u64::from(i), false)).unwrap();
        let mut log = EventLog::in_memory();
        verify(&a, 4, Arc::new(BuiltinBackend::default()), &Limits::default(), &mut log);
        let mut pending = BTreeSet::new();
        for e in log.events() {
            match e.event {
                "assign" => assert!(pending.insert(e.trace.clone()), "duplicate {:?}", e.trace),
                "result" => {
                    pending.remove(&e.trace);
                }
                _ => {}
            }
        }
    }
}
