//! JSON-lines log of what the engines hand out and get back.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::automata::Trace;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Event {
    /// Seconds since the run started.
    pub ts: f64,
    pub event: &'static str,
    pub worker: Option<usize>,
    pub seq: Option<u64>,
    pub trace_hash: Option<String>,
    pub trace: Option<String>,
    pub abstraction_states: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Event {
    /// The event without its timestamp, for comparing runs.
    pub fn untimed(&self) -> Event {
        Event { ts: 0.0, ..self.clone() }
    }
}

/// Collects events in memory and optionally streams them as JSON lines.
pub struct EventLog {
    start: Instant,
    keep: bool,
    events: Vec<Event>,
    sink: Option<Box<dyn Write + Send>>,
}

impl Default for EventLog {
    fn default() -> Self {
        EventLog::discard()
    }
}

impl EventLog {
    pub fn discard() -> Self {
        EventLog {
            start: Instant::now(),
            keep: false,
            events: Vec::new(),
            sink: None,
        }
    }

    pub fn in_memory() -> Self {
        let mut log = EventLog::discard();
        log.keep = true;
        log
    }

    pub fn to_writer(w: impl Write + Send + 'static) -> Self {
        let mut log = EventLog::discard();
        log.sink = Some(Box::new(w));
        log
    }

    pub(crate) fn restart_clock(&mut self) {
        self.start = Instant::now();
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub(crate) fn record(
        &mut self,
        event: &'static str,
        worker: Option<usize>,
        seq: Option<u64>,
        trace: Option<&Trace>,
        abstraction_states: usize,
        detail: Option<String>,
    ) {
        if !self.keep && self.sink.is_none() {
            return;
        }
        let e = Event {
            ts: self.start.elapsed().as_secs_f64(),
            event,
            worker,
            seq,
            trace_hash: trace.map(Trace::hash_hex),
            trace: trace.map(ToString::to_string),
            abstraction_states,
            detail,
        };
        if let Some(w) = &mut self.sink {
            if let Ok(line) = serde_json::to_string(&e) {
                // A broken log sink must not abort verification.
                let _ = writeln!(w, "{line}");
            }
        }
        if self.keep {
            self.events.push(e);
        }
    }
}

impl Drop for EventLog {
    fn drop(&mut self) {
        if let Some(w) = &mut self.sink {
            let _ = w.flush();
        }
    }
}
