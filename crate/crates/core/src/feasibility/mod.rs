//! Trace feasibility checking.
//!
//! A backend decides whether a trace can execute. Infeasible traces come
//! back with an inductive sequence of predicates proving it: the first is
//! `true`, the last `false`, and each step is a valid Hoare triple.

mod builtin;
mod smtlib;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use num_bigint::BigInt;
use thiserror::Error;

use crate::automata::Trace;
use crate::interp::{replay, Store};
use crate::logic::{hoare_valid, Predicate, SolverConfig};

pub use builtin::{interpolate, simplify_interpolants, BuiltinBackend};
pub use smtlib::{smtlib_check, smtlib_script, SmtLibBackend};

/// A concrete execution of a trace: initial values and the value chosen
/// by each havoc, in order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub initial: Store,
    pub havocs: Vec<BigInt>,
}

impl Witness {
    /// The final store, if the trace really executes from this witness.
    pub fn replay(&self, trace: &Trace) -> Option<Store> {
        replay(trace, &self.initial, &self.havocs)
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, x) in &self.initial {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{v}={x}")?;
        }
        if !self.havocs.is_empty() {
            let hs: Vec<String> = self.havocs.iter().map(ToString::to_string).collect();
            write!(f, "{}havocs=[{}]", if first { "" } else { " " }, hs.join(","))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FeasibilityResult {
    Sat(Witness),
    /// One predicate per position, `trace.len() + 1` in total.
    Unsat(Vec<Predicate>),
    Unknown(String),
}

impl FeasibilityResult {
    pub fn kind(&self) -> &'static str {
        match self {
            FeasibilityResult::Sat(_) => "sat",
            FeasibilityResult::Unsat(_) => "unsat",
            FeasibilityResult::Unknown(_) => "unknown",
        }
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("cannot launch `{command}`: {source}")]
    Launch {
        command: String,
        source: std::io::Error,
    },
    #[error("solver protocol violation: {0}")]
    Protocol(String),
    #[error("solver i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub trait Backend: Send + Sync {
    fn check_trace(&self, trace: &Trace) -> Result<FeasibilityResult, BackendError>;
}

impl<B: Backend + ?Sized> Backend for Arc<B> {
    fn check_trace(&self, trace: &Trace) -> Result<FeasibilityResult, BackendError> {
        (**self).check_trace(trace)
    }
}

/// Sleeps before every check. Used to emulate expensive solver calls.
pub struct Delayed<B> {
    pub inner: B,
    pub delay: Duration,
}

impl<B: Backend> Backend for Delayed<B> {
    fn check_trace(&self, trace: &Trace) -> Result<FeasibilityResult, BackendError> {
        thread::sleep(self.delay);
        self.inner.check_trace(trace)
    }
}

/// Which backend to use, as written on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BackendConfig {
    Builtin,
    /// A solver command line, split on whitespace.
    SmtLib(String),
}

impl FromStr for BackendConfig {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.split_once(':') {
            None if s == "builtin" => Ok(BackendConfig::Builtin),
            Some(("smtlib", cmd)) if !cmd.trim().is_empty() => {
                Ok(BackendConfig::SmtLib(cmd.trim().to_string()))
            }
            _ => Err(format!(
                "unknown backend `{s}` (expected `builtin` or `smtlib:<command>`)"
            )),
        }
    }
}

impl fmt::Display for BackendConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BackendConfig::Builtin => f.write_str("builtin"),
            BackendConfig::SmtLib(cmd) => write!(f, "smtlib:{cmd}"),
        }
    }
}

impl BackendConfig {
    pub fn build(&self, solver: SolverConfig, timeout: Duration) -> Arc<dyn Backend> {
        match self {
            BackendConfig::Builtin => Arc::new(BuiltinBackend::new(solver)),
            BackendConfig::SmtLib(cmd) => Arc::new(SmtLibBackend::new(cmd, timeout, solver)),
        }
    }
}

/// Checks that `seq` is an inductive infeasibility proof for `trace`.
/// Returns the index of the first broken triple.
pub fn validate_interpolants(
    trace: &[crate::lang::expr::Operation],
    seq: &[Predicate],
    cfg: &SolverConfig,
) -> Result<(), usize> {
    if seq.len() != trace.len() + 1 || !seq[0].is_true() || !seq[trace.len()].is_false() {
        return Err(usize::MAX);
    }
    for (i, op) in trace.iter().enumerate() {
        if !hoare_valid(&seq[i], op, &seq[i + 1], cfg) {
            return Err(i);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backend_config_parsing() {
        assert_eq!("builtin".parse(), Ok(BackendConfig::Builtin));
        assert_eq!(
            "smtlib:z3 -in".parse(),
            Ok(BackendConfig::SmtLib("z3 -in".into()))
        );
        assert!("smtlib:".parse::<BackendConfig>().is_err());
        assert!("cvc".parse::<BackendConfig>().is_err());
        assert_eq!(BackendConfig::SmtLib("z3 -in".into()).to_string(), "smtlib:z3 -in");
    }
}
