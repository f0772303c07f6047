//! Where work items run: a pool of threads, or inline for tests.

use std::collections::VecDeque;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use crossbeam_channel::{bounded, unbounded, Receiver, Sender};

use super::worker::{worker_run, WorkItem, WorkResult, WorkVerdict};
use crate::automata::Nfa;
use crate::feasibility::Backend;
use crate::logic::SolverConfig;

pub trait Executor {
    fn pool_size(&self) -> usize;

    /// Hands an item to the pool. Returns the worker id if it is already
    /// known at this point.
    fn submit(&mut self, item: WorkItem) -> Option<usize>;

    /// Blocks until a result is available or the deadline passes.
    fn wait(&mut self, deadline: Option<Instant>) -> Option<WorkResult>;

    /// A result if one is ready now.
    fn try_take(&mut self) -> Option<WorkResult>;
}

fn run_guarded(
    item: &WorkItem,
    worker: usize,
    backend: &dyn Backend,
    solver: &SolverConfig,
) -> WorkResult {
    let start = Instant::now();
    catch_unwind(AssertUnwindSafe(|| worker_run(item, worker, backend, solver))).unwrap_or_else(
        |_| WorkResult {
            seq: item.seq,
            worker,
            trace: item.trace.clone(),
            verdict: WorkVerdict::Unknown("worker panicked".into()),
            automaton: Nfa::empty([]),
            busy: start.elapsed(),
        },
    )
}

/// Long-lived worker threads fed through a bounded work queue; results
/// come back through a separate queue. Dropping the pool closes the work
/// queue; workers finish their current item and exit on their own.
pub struct ThreadPool {
    size: usize,
    work: Sender<WorkItem>,
    results: Receiver<WorkResult>,
}

impl ThreadPool {
    pub fn new(size: usize, backend: Arc<dyn Backend>, solver: SolverConfig) -> Self {
        assert!(size >= 1, "a pool needs at least one worker");
        let (work_tx, work_rx) = bounded::<WorkItem>(size);
        let (result_tx, result_rx) = unbounded();
        for id in 0..size {
            let work_rx = work_rx.clone();
            let result_tx = result_tx.clone();
            let backend = Arc::clone(&backend);
            thread::Builder::new()
                .name(format!("partrace-worker-{id}"))
                .spawn(move || {
                    for item in work_rx {
                        let r = run_guarded(&item, id, backend.as_ref(), &solver);
                        if result_tx.send(r).is_err() {
                            break;
                        }
                    }
                })
                .expect("spawn worker thread");
        }
        ThreadPool {
            size,
            work: work_tx,
            results: result_rx,
        }
    }
}

impl Executor for ThreadPool {
    fn pool_size(&self) -> usize {
        self.size
    }

    fn submit(&mut self, item: WorkItem) -> Option<usize> {
        self.work.send(item).expect("workers alive");
        None
    }

    fn wait(&mut self, deadline: Option<Instant>) -> Option<WorkResult> {
        match deadline {
            Some(d) => self.results.recv_deadline(d).ok(),
            None => self.results.recv().ok(),
        }
    }

    fn try_take(&mut self) -> Option<WorkResult> {
        self.results.try_recv().ok()
    }
}

/// Runs items on the calling thread: each `wait` executes the oldest
/// pending item. Workers are assigned round-robin. Deterministic.
pub struct SyncExecutor {
    size: usize,
    next_worker: usize,
    pending: VecDeque<(usize, WorkItem)>,
    backend: Arc<dyn Backend>,
    solver: SolverConfig,
}

impl SyncExecutor {
    pub fn new(size: usize, backend: Arc<dyn Backend>, solver: SolverConfig) -> Self {
        assert!(size >= 1, "a pool needs at least one worker");
        SyncExecutor {
            size,
            next_worker: 0,
            pending: VecDeque::new(),
            backend,
            solver,
        }
    }
}

impl Executor for SyncExecutor {
    fn pool_size(&self) -> usize {
        self.size
    }

    fn submit(&mut self, item: WorkItem) -> Option<usize> {
        let w = self.next_worker;
        self.next_worker = (self.next_worker + 1) % self.size;
        self.pending.push_back((w, item));
        Some(w)
    }

    fn wait(&mut self, _deadline: Option<Instant>) -> Option<WorkResult> {
        let (w, item) = self.pending.pop_front()?;
        Some(run_guarded(&item, w, self.backend.as_ref(), &self.solver))
    }

    fn try_take(&mut self) -> Option<WorkResult> {
        None
    }
}
