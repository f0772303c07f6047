//! Verification engines: the sequential refinement loop and the parallel
//! coordinator with its worker pool.

pub mod events;
pub mod parallel;
pub mod sequential;

use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

use crate::automata::{Nfa, Trace};
use crate::feasibility::{Backend, Witness};
use crate::logic::SolverConfig;

pub use events::{Event, EventLog};
pub use parallel::{verify_parallel, verify_parallel_with};
pub use sequential::verify_sequential;

/// Resource bounds of one run.
#[derive(Clone, Debug)]
pub struct Limits {
    pub timeout: Option<Duration>,
    pub max_refinements: usize,
    /// Wall-time budget of one trace selection in the parallel engine.
    pub search_budget: Duration,
    pub solver: SolverConfig,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            timeout: None,
            max_refinements: 10_000,
            search_budget: Duration::from_secs(5),
            solver: SolverConfig::default(),
        }
    }
}

impl Limits {
    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        self.timeout.map(|t| start + t)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Safe,
    Unsafe { trace: Trace, witness: Witness },
    Unknown(String),
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Safe => "SAFE",
            Outcome::Unsafe { .. } => "UNSAFE",
            Outcome::Unknown(_) => "UNKNOWN",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Unknown(reason) => write!(f, "UNKNOWN ({reason})"),
            other => f.write_str(other.label()),
        }
    }
}

/// One processed trace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iteration {
    pub trace_len: usize,
    pub result: &'static str,
    /// Abstraction size after processing the result.
    pub abstraction_states: usize,
}

#[derive(Clone, Debug, Default)]
pub struct RunStats {
    pub refinements: usize,
    pub traces_checked: usize,
    pub wall_time: Duration,
    pub final_abstraction_states: usize,
    pub iterations: Vec<Iteration>,
    /// Traces in the order they were handed out for checking.
    pub checked: Vec<Trace>,
    /// Results whose trace the abstraction had already excluded.
    pub wasted_results: usize,
    /// Time each worker spent on checks.
    pub worker_busy: Vec<Duration>,
    /// Longest run of consecutive result polls that found nothing.
    pub max_empty_polls: usize,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub outcome: Outcome,
    pub stats: RunStats,
}

/// Runs the sequential engine for `workers == 0`, otherwise the parallel
/// engine on a thread pool of that size.
pub fn verify(
    program: &Nfa,
    workers: usize,
    backend: Arc<dyn Backend>,
    limits: &Limits,
    log: &mut EventLog,
) -> Verdict {
    if workers == 0 {
        verify_sequential(program, backend.as_ref(), limits, log)
    } else {
        verify_parallel(program, workers, backend, limits, log)
    }
}
