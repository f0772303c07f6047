//! Linear integer predicates and the reasoning used on them.

pub mod linear;
pub mod post;
pub mod predicate;
pub mod solver;
pub mod ssa;

pub use post::{hoare_valid, strongest_post, weakest_pre, Post};
pub use predicate::{Cube, Predicate};
pub use solver::{implies, is_satisfiable, Model, SatResult, SolverConfig};
pub use ssa::{encode_trace, SsaFormula};
