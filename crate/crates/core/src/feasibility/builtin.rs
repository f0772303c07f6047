use super::{Backend, BackendError, FeasibilityResult, Witness};
use crate::automata::Trace;
use crate::lang::expr::{Operation, Var};
use crate::logic::solver::Model;
use crate::logic::ssa::SsaFormula;
use crate::logic::{
    encode_trace, hoare_valid, implies, is_satisfiable, strongest_post, weakest_pre, Predicate,
    SatResult, SolverConfig,
};

/// Decides feasibility with the builtin solver and proves infeasibility
/// with strongest-postcondition interpolants.
#[derive(Clone, Debug)]
pub struct BuiltinBackend {
    pub solver: SolverConfig,
    /// Greedily weaken interpolants after computing them.
    pub simplify: bool,
}

impl BuiltinBackend {
    pub fn new(solver: SolverConfig) -> Self {
        BuiltinBackend {
            solver,
            simplify: true,
        }
    }
}

impl Default for BuiltinBackend {
    fn default() -> Self {
        BuiltinBackend::new(SolverConfig::default())
    }
}

impl Backend for BuiltinBackend {
    fn check_trace(&self, trace: &Trace) -> Result<FeasibilityResult, BackendError> {
        let formula = encode_trace(trace);
        Ok(
            match is_satisfiable(&formula.conjunction(&self.solver), &self.solver) {
                SatResult::Sat(model) => witness_from_model(trace, &formula, &model),
                SatResult::Unknown => FeasibilityResult::Unknown("solver gave up".into()),
                SatResult::Unsat => self.unsat_result(trace),
            },
        )
    }
}

impl BuiltinBackend {
    /// The interpolant part of an UNSAT answer, shared with the SMT-LIB
    /// backend.
    pub(crate) fn unsat_result(&self, trace: &Trace) -> FeasibilityResult {
        match interpolate(trace, &self.solver) {
            Some(seq) if self.simplify => {
                FeasibilityResult::Unsat(simplify_interpolants(trace, seq, &self.solver))
            }
            Some(seq) => FeasibilityResult::Unsat(seq),
            None => FeasibilityResult::Unknown("interpolation failed".into()),
        }
    }
}

/// Reads version-0 values and havoc choices off an SSA model and makes
/// sure they really drive the trace to its end.
pub(crate) fn witness_from_model(
    trace: &Trace,
    formula: &SsaFormula,
    model: &Model,
) -> FeasibilityResult {
    let value = |v: &Var| model.get(v).cloned().unwrap_or_default();
    let vars: std::collections::BTreeSet<_> = trace.iter().flat_map(Operation::vars).collect();
    let witness = Witness {
        initial: vars.iter().map(|v| (v.clone(), value(&v.versioned(0)))).collect(),
        havocs: formula.havocs.iter().map(|(_, v)| value(v)).collect(),
    };
    match witness.replay(trace) {
        Some(_) => FeasibilityResult::Sat(witness),
        None => FeasibilityResult::Unknown("model does not replay".into()),
    }
}

/// An inductive sequence `true, …, false` for an infeasible trace.
///
/// The strongest-postcondition sequence is tried first. Integer projection
/// can lose divisibility facts, in which case it may fail to reach
/// `false`; the weakest-precondition sequence from `false` backwards is
/// then used instead, provided it reaches `true` at the start. `None` if
/// neither closes.
pub fn interpolate(trace: &[Operation], cfg: &SolverConfig) -> Option<Vec<Predicate>> {
    let mut seq = Vec::with_capacity(trace.len() + 1);
    seq.push(Predicate::truth());
    for op in trace {
        let next = strongest_post(seq.last().unwrap(), op, cfg).pred;
        seq.push(next);
    }
    if seq.last().unwrap().is_false() {
        // Once false, stay false: later positions are already `false`.
        return Some(seq);
    }

    let mut back = vec![Predicate::falsity()];
    for op in trace.iter().rev() {
        back.push(weakest_pre(back.last().unwrap(), op, cfg)?);
    }
    back.reverse();
    if !implies(&Predicate::truth(), &back[0], cfg) {
        return None;
    }
    back[0] = Predicate::truth();
    Some(back)
}

/// Weakens interpolants by dropping atoms, from the end of the trace
/// towards its start, as long as every triple stays valid.
///
/// Weakening `I_i` can only break the triple that leaves position `i`, so
/// each candidate is checked against the (already simplified) successor.
pub fn simplify_interpolants(
    trace: &[Operation],
    mut seq: Vec<Predicate>,
    cfg: &SolverConfig,
) -> Vec<Predicate> {
    for i in (1..trace.len()).rev() {
        'restart: loop {
            let current = seq[i].clone();
            for (ci, cube) in current.cubes().iter().enumerate() {
                for (term, _) in cube.atoms() {
                    let candidate = current.drop_atom(ci, term);
                    if hoare_valid(&candidate, &trace[i], &seq[i + 1], cfg) {
                        seq[i] = candidate;
                        continue 'restart;
                    }
                }
            }
            break;
        }
    }
    seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::validate_interpolants;
    use crate::lang::parser::parse_condition;

    fn pred(s: &str) -> Predicate {
        Predicate::from_condition(&parse_condition(s).unwrap())
    }

    fn check(t: &str) -> FeasibilityResult {
        BuiltinBackend::default()
            .check_trace(&t.parse().unwrap())
            .unwrap()
    }

    fn check_raw(t: &str) -> FeasibilityResult {
        let b = BuiltinBackend {
            simplify: false,
            ..BuiltinBackend::default()
        };
        b.check_trace(&t.parse().unwrap()).unwrap()
    }

    #[test]
    fn if_branch_sp_sequence() {
        let FeasibilityResult::Unsat(seq) = check_raw("x>0, x=-x;, !(x!=0)") else {
            panic!()
        };
        assert_eq!(seq, vec![pred("true"), pred("x>0"), pred("x<0"), pred("false")]);
    }

    #[test]
    fn else_branch_is_infeasible() {
        // x <= 0, x <= -10 and x == 0 cannot hold together.
        let FeasibilityResult::Unsat(seq) = check_raw("!(x>0), !(x>-10), !(x!=0)") else {
            panic!()
        };
        assert_eq!(seq, vec![pred("true"), pred("x<=0"), pred("x<=-10"), pred("false")]);
        let FeasibilityResult::Unsat(simple) = check("!(x>0), !(x>-10), !(x!=0)") else {
            panic!()
        };
        assert_eq!(simple, vec![pred("true"), pred("true"), pred("x<=-10"), pred("false")]);
    }

    #[test]
    fn feasible_trace_has_replaying_witness() {
        let t: Trace = "x>0, x=-x;, x!=0".parse().unwrap();
        let FeasibilityResult::Sat(w) = BuiltinBackend::default().check_trace(&t).unwrap() else {
            panic!()
        };
        assert!(w.replay(&t).is_some());
        assert!(matches!(check("true"), FeasibilityResult::Sat(_)));
    }

    #[test]
    fn wp_fallback_when_projection_loses_parity() {
        // y = 2x makes y even; the projection of x forgets that.
        let t = "y==2*x, x=0;, y==2*z+1";
        let FeasibilityResult::Unsat(seq) = check(t) else {
            panic!("{:?}", check(t))
        };
        let ops: Trace = t.parse().unwrap();
        assert_eq!(validate_interpolants(&ops, &seq, &SolverConfig::default()), Ok(()));
    }

    #[test]
    fn simplified_sequences_stay_inductive() {
        let cfg = SolverConfig::default();
        for t in [
            "x>0, x=-x;, !(x!=0)",
            "x=0;, y=x+1;, havoc z;, z>y, x>=z",
            "havoc x;, x>=3, y=x;, y=y-3;, y<0",
        ] {
            let ops: Trace = t.parse().unwrap();
            let FeasibilityResult::Unsat(seq) = check(t) else {
                panic!("{t}")
            };
            assert_eq!(validate_interpolants(&ops, &seq, &cfg), Ok(()), "{t}");
        }
    }
}
