//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the report is always printed.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use partrace::automata::{Nfa, Trace};
use partrace::bench::{bench_sweep, gen_family, Expected, Family, SweepConfig, TaskSpec};
use partrace::engine::parallel::{diverse_search, SyncExecutor};
use partrace::engine::{verify, verify_parallel_with, verify_sequential, EventLog, Limits, Outcome};
use partrace::feasibility::{validate_interpolants, Backend, BuiltinBackend, Delayed, FeasibilityResult};
use partrace::interpolant::build_interpolant_automaton;
use partrace::lang::compile;
use partrace::lang::parser::parse_condition;
use partrace::logic::{Predicate, SolverConfig};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{enumerate_words, feasible_in_box, letters, random_nfa, random_trace};

const NOT_ZERO: &str = include_str!("../examples/programs/notzero.imp");

type Check = Result<String, String>;

fn t(s: &str) -> Trace {
    s.parse().unwrap()
}

fn pred(s: &str) -> Predicate {
    Predicate::from_condition(&parse_condition(s).unwrap())
}

fn builtin() -> Arc<dyn Backend> {
    Arc::new(BuiltinBackend::default())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn notzero_end_to_end() -> Check {
    let start = Instant::now();
    let a = compile(NOT_ZERO).map_err(|e| e.to_string())?;
    for workers in [0, 1, 2, 4, 6] {
        let v = verify(&a, workers, builtin(), &Limits::default(), &mut EventLog::discard());
        ensure(v.outcome == Outcome::Safe, || format!("workers={workers}: {}", v.outcome))?;
    }

    let mut exec = SyncExecutor::new(2, builtin(), SolverConfig::default());
    let mut log = EventLog::in_memory();
    let v = verify_parallel_with(&a, &mut exec, &Limits::default(), &mut log);
    ensure(v.outcome == Outcome::Safe, || format!("sync executor: {}", v.outcome))?;
    let first_result = log
        .events()
        .iter()
        .position(|e| e.event == "result")
        .ok_or("no result events")?;
    let assigned: Vec<String> = log.events()[..first_result]
        .iter()
        .filter(|e| e.event == "assign")
        .filter_map(|e| e.trace.clone())
        .collect();
    let expected = [t("x>0, x=-x;, !(x!=0)").to_string(), t("!(x>0), !(x>-10), !(x!=0)").to_string()];
    ensure(assigned == expected, || format!("assigned before first result: {assigned:?}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("SAFE for 0,1,2,4,6 workers; pi1, pi2 assigned first; {elapsed:.2?}"))
}

fn loop_generalization() -> Check {
    let a = compile(NOT_ZERO).map_err(|e| e.to_string())?;
    let trace = t("!(x>0), !(x>-10), !(x!=0)");
    let seq = [pred("true"), pred("x<=0"), pred("x<=-10"), pred("false")];
    let cfg = SolverConfig::default();
    let ia = build_interpolant_automaton(&trace, &seq, &a, &cfg).map_err(|e| e.to_string())?;
    for n in 0..=5 {
        let mut ops = vec!["!(x>0)".to_string()];
        ops.extend(std::iter::repeat_n("x>-10, x=x-1;".to_string(), n));
        ops.push("!(x>-10), !(x!=0)".into());
        let unrolled = t(&ops.join(", "));
        ensure(ia.nfa.accepts(&unrolled), || format!("rejects {unrolled}"))?;
    }
    let bad = ia.invalid_edges(&cfg);
    ensure(bad.is_empty(), || format!("invalid edges {bad:?}"))?;
    Ok(format!(
        "{} states, {} edges, accepts n=0..5 unrollings, all triples valid",
        ia.nfa.count_states(),
        ia.nfa.transitions().len()
    ))
}

fn difference_oracle() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(3);
    let mut words = 0u64;
    for pair in 0..200 {
        let alphabet = letters(rng.gen_range(1..=4));
        let a = random_nfa(&mut rng, 6, &alphabet);
        let b = random_nfa(&mut rng, 6, &alphabet);
        let d = a.difference(&b);
        let mut mismatch = None;
        enumerate_words(&[&a, &b, &d], &alphabet, 8, &mut |w, acc| {
            words += 1; // words some automaton can still read
            if acc[2] != (acc[0] && !acc[1]) && mismatch.is_none() {
                mismatch = Some(Trace::new(w.to_vec()));
            }
        });
        if let Some(w) = mismatch {
            return Err(format!("pair {pair}: word `{w}`"));
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("200 pairs, {words} live words checked, 0 mismatches, {elapsed:.2?}"))
}

fn feasibility_oracle() -> Check {
    let mut rng = StdRng::seed_from_u64(4);
    let backend = BuiltinBackend::default();
    let cfg = SolverConfig::default();
    let (mut sat, mut unsat) = (0, 0);
    for i in 0..200 {
        let k = rng.gen_range(1..=3);
        let trace = random_trace(&mut rng, k, 8);
        let truth = feasible_in_box(&trace, k, 20);
        match backend.check_trace(&trace).map_err(|e| e.to_string())? {
            FeasibilityResult::Sat(w) => {
                ensure(truth, || format!("#{i} `{trace}`: SAT, box search found nothing"))?;
                ensure(w.replay(&trace).is_some(), || format!("#{i} `{trace}`: model {w} does not replay"))?;
                sat += 1;
            }
            FeasibilityResult::Unsat(seq) => {
                ensure(!truth, || format!("#{i} `{trace}`: UNSAT but feasible"))?;
                validate_interpolants(&trace, &seq, &cfg)
                    .map_err(|j| format!("#{i} `{trace}`: triple {j} invalid"))?;
                unsat += 1;
            }
            FeasibilityResult::Unknown(r) => return Err(format!("#{i} `{trace}`: unknown ({r})")),
        }
    }
    Ok(format!("200 traces ({sat} SAT, {unsat} UNSAT), 0 mismatches"))
}

/// 50 generated programs, half with a planted bug.
fn corpus() -> Vec<(String, String, bool)> {
    let families = [Family::Branches, Family::Loops, Family::Mixed];
    (0..50)
        .map(|i| {
            let family = families[i % 3];
            let n = 1 + (i / 3) % 4;
            let bug = i % 2 == 1;
            let seed = i as u64;
            (format!("{family}-{n}-{seed}{}", if bug { "-bug" } else { "" }), gen_family(family, n, seed, bug), bug)
        })
        .collect()
}

fn verdict_stability() -> Check {
    let (mut safe, mut unsafe_) = (0, 0);
    for (label, src, bug) in corpus() {
        let a = compile(&src).map_err(|e| format!("{label}: {e}"))?;
        let want = if bug { "UNSAFE" } else { "SAFE" };
        for workers in [1, 2, 4, 6] {
            let v = verify(&a, workers, builtin(), &Limits::default(), &mut EventLog::discard());
            ensure(v.outcome.label() == want, || format!("{label} workers={workers}: {}", v.outcome))?;
            if let Outcome::Unsafe { trace, witness } = &v.outcome {
                ensure(a.accepts(trace) && witness.replay(trace).is_some(), || {
                    format!("{label}: witness does not replay")
                })?;
            }
        }
        if bug {
            unsafe_ += 1;
        } else {
            safe += 1;
        }
    }
    Ok(format!("{safe} SAFE + {unsafe_} UNSAFE programs x 4 pool sizes, 0 incorrect"))
}

fn speedup() -> Check {
    let start = Instant::now();
    let cfg = SweepConfig {
        worker_counts: vec![1, 2, 4],
        repetitions: 5,
        limits: Limits::default(),
        backend: Arc::new(Delayed {
            inner: BuiltinBackend::default(),
            delay: Duration::from_millis(200),
        }),
    };
    let task = TaskSpec::inline("branches-8", gen_family(Family::Branches, 8, 0, false), Expected::Safe);
    let report = bench_sweep(&[task], &cfg);
    ensure(report.records.iter().all(|r| r.correct), || "incorrect verdict".into())?;
    let s2 = report.speedup("branches-8", 2).unwrap_or(0.0);
    let s4 = report.speedup("branches-8", 4).unwrap_or(0.0);
    let elapsed = start.elapsed();
    let detail = format!("median speedup 2w {s2:.2}, 4w {s4:.2}, {elapsed:.1?}");
    ensure(s2 >= 1.4 && s4 >= 2.0 && elapsed < Duration::from_secs(300), || detail.clone())?;
    Ok(detail)
}

fn sequential_equivalence() -> Check {
    let mut programs = vec![
        ("notzero".to_string(), NOT_ZERO.to_string()),
        ("notzero_bad".to_string(), include_str!("../examples/programs/notzero_bad.imp").to_string()),
    ];
    programs.extend(corpus().into_iter().map(|(l, s, _)| (l, s)));
    // Worker ids differ by design (the sequential engine has none); the
    // rest of each event must match.
    let strip = |log: &EventLog| -> Vec<String> {
        log.events()
            .iter()
            .map(|e| format!("{} {:?} {:?} {} {:?}", e.event, e.seq, e.trace, e.abstraction_states, e.detail))
            .collect()
    };
    for (label, src) in &programs {
        let a = compile(src).map_err(|e| format!("{label}: {e}"))?;
        let mut seq_log = EventLog::in_memory();
        let s = verify_sequential(&a, &BuiltinBackend::default(), &Limits::default(), &mut seq_log);
        let mut exec = SyncExecutor::new(1, builtin(), SolverConfig::default());
        let mut par_log = EventLog::in_memory();
        let p = verify_parallel_with(&a, &mut exec, &Limits::default(), &mut par_log);
        ensure(s.stats.checked == p.stats.checked, || format!("{label}: checked traces differ"))?;
        ensure(strip(&seq_log) == strip(&par_log), || format!("{label}: logs differ"))?;
        ensure(s.outcome == p.outcome, || format!("{label}: {} vs {}", s.outcome, p.outcome))?;
    }
    Ok(format!("{} programs, identical trace sequences and logs", programs.len()))
}

fn diverse_search_examples() -> Check {
    let a = compile(NOT_ZERO).map_err(|e| e.to_string())?.trim();
    let pi1 = t("x>0, x=-x;, !(x!=0)");
    let pi2 = t("!(x>0), !(x>-10), !(x!=0)");
    let pi3 = t("!(x>0), x>-10, x=x-1;, !(x>-10), !(x!=0)");
    let root = Trace::default();
    let got1 = diverse_search(&a, a.initial(), &root, &[&pi1], None).map_err(|_| "budget")?;
    ensure(got1.as_ref() == Some(&pi2), || format!("relevant={{pi1}} gave {got1:?}"))?;
    let got2 = diverse_search(&a, a.initial(), &root, &[&pi1, &pi2], None).map_err(|_| "budget")?;
    ensure(got2.as_ref() == Some(&pi3), || format!("relevant={{pi1,pi2}} gave {got2:?}"))?;
    Ok("{pi1} -> pi2, {pi1, pi2} -> pi3".into())
}

fn permutations3() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

fn refinement_commutativity() -> Check {
    let mut rng = StdRng::seed_from_u64(9);
    for set in 0..50 {
        let alphabet = letters(rng.gen_range(1..=4));
        let abs = random_nfa(&mut rng, 6, &alphabet);
        let parts: Vec<Nfa> = (0..3).map(|_| random_nfa(&mut rng, 4, &alphabet)).collect();
        let results: Vec<Nfa> = permutations3()
            .iter()
            .map(|order| order.iter().fold(abs.clone(), |acc, &i| acc.difference(&parts[i])))
            .collect();
        let refs: Vec<&Nfa> = results.iter().collect();
        let mut mismatch = None;
        enumerate_words(&refs, &alphabet, 8, &mut |w, acc| {
            if acc.iter().any(|&x| x != acc[0]) && mismatch.is_none() {
                mismatch = Some(Trace::new(w.to_vec()));
            }
        });
        if let Some(w) = mismatch {
            return Err(format!("set {set}: orders disagree on `{w}`"));
        }
    }
    Ok("50 sets x 6 orders, language-equal on words <= 8".into())
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 9] = [
        ("NotZero end-to-end", notzero_end_to_end),
        ("loop-generalizing interpolant automaton", loop_generalization),
        ("difference oracle", difference_oracle),
        ("feasibility oracle", feasibility_oracle),
        ("verdict stability", verdict_stability),
        ("speedup at desk scale", speedup),
        ("sequential equivalence", sequential_equivalence),
        ("diverse search", diverse_search_examples),
        ("refinement commutativity", refinement_commutativity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
