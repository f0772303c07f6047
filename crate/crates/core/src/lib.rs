//! Trace abstraction with parallel refinement.
//!
//! A program in a small integer language is turned into an automaton whose
//! accepting states are failed assertions. The verifier repeatedly picks an
//! accepted trace, checks whether it is feasible, and if not, removes a
//! generalization of it (an interpolant automaton) from the abstraction.
//! The parallel engine hands traces to a pool of workers and refines with
//! whatever results come back, in whatever order.

pub mod automata;
pub mod lang;
pub mod logic;
pub mod feasibility;
pub mod interp;
pub mod interpolant;
pub mod engine;
pub mod bench;
pub mod cli;
