//! Desk-scale evaluation: synthetic program families and worker sweeps.

pub mod gen;
pub mod sweep;

pub use gen::{gen_family, Family};
pub use sweep::{
    bench_sweep, load_suite, parse_suite, BenchRecord, Expected, SpeedupRow, SweepConfig,
    SweepReport, TaskProgram, TaskSpec,
};
