//! Finite automata over operations and the traces they accept.

pub mod format;
pub mod nfa;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::lang::expr::Operation;
use crate::lang::parser::ParseError;

pub use format::{load_automaton, load_nfa, parse_operation, serialize, FormatError};
pub use nfa::{Nfa, StateId, Transition};

/// A program automaton: accepting states are error locations.
pub type ProgramAutomaton = Nfa;

/// A finite sequence of operations.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(Vec<Operation>);

impl Trace {
    pub fn new(ops: Vec<Operation>) -> Self {
        Trace(ops)
    }

    pub fn ops(&self) -> &[Operation] {
        &self.0
    }

    pub fn into_ops(self) -> Vec<Operation> {
        self.0
    }

    /// `self ⪯ other`
    pub fn is_prefix_of(&self, other: &[Operation]) -> bool {
        other.starts_with(&self.0)
    }

    pub fn extended(&self, op: &Operation) -> Trace {
        let mut ops = self.0.clone();
        ops.push(op.clone());
        Trace(ops)
    }

    pub fn concat(&self, rest: &[Operation]) -> Trace {
        let mut ops = self.0.clone();
        ops.extend_from_slice(rest);
        Trace(ops)
    }

    /// Short stable digest of the canonical text, for logs.
    pub fn hash_hex(&self) -> String {
        let mut h = Sha256::new();
        for op in &self.0 {
            h.update(op.text().as_bytes());
            h.update([0u8]);
        }
        h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl Deref for Trace {
    type Target = [Operation];

    fn deref(&self) -> &[Operation] {
        &self.0
    }
}

impl FromIterator<Operation> for Trace {
    fn from_iter<I: IntoIterator<Item = Operation>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(op.text())?;
        }
        Ok(())
    }
}

/// Parses the `Display` form: operations separated by commas.
impl FromStr for Trace {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(parse_operation)
            .collect()
    }
}
