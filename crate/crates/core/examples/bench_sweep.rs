//! A small worker sweep with an artificial 50 ms cost per feasibility
//! check, printing per-run rows and the median speedups.

use std::io;
use std::sync::Arc;
use std::time::Duration;

use partrace::bench::{bench_sweep, gen_family, Expected, Family, SweepConfig, TaskSpec};
use partrace::engine::Limits;
use partrace::feasibility::{BuiltinBackend, Delayed};

fn main() {
    let tasks = [
        TaskSpec::inline("branches-6", gen_family(Family::Branches, 6, 0, false), Expected::Safe),
        TaskSpec::inline("loops-2", gen_family(Family::Loops, 2, 0, false), Expected::Safe),
        TaskSpec::inline("mixed-4-bug", gen_family(Family::Mixed, 4, 1, true), Expected::Unsafe),
    ];
    let cfg = SweepConfig {
        worker_counts: vec![1, 2, 4],
        repetitions: 3,
        limits: Limits::default(),
        backend: Arc::new(Delayed {
            inner: BuiltinBackend::default(),
            delay: Duration::from_millis(50),
        }),
    };
    let report = bench_sweep(&tasks, &cfg);
    report.write_csv(io::stdout()).unwrap();
    println!("\n{report}");
}
