//! Static single assignment encoding of traces.

use std::collections::BTreeMap;
use std::fmt;

use super::linear::LinExpr;
use super::predicate::Predicate;
use super::solver::{prune, SolverConfig};
use crate::lang::expr::{CmpOp, OpKind, Operation, Var};

/// One conjunct per operation, over versioned variables `x@i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SsaFormula {
    /// `conjuncts[i]` encodes `trace[i]`; havocs contribute `true`.
    pub conjuncts: Vec<Predicate>,
    /// Version of each variable after the last operation. Variables that
    /// are never assigned are absent (their version is 0).
    pub versions: BTreeMap<Var, u32>,
    /// Every versioned variable introduced by a havoc, in trace order.
    pub havocs: Vec<(usize, Var)>,
}

impl SsaFormula {
    pub fn version(&self, x: &Var) -> u32 {
        self.versions.get(x).copied().unwrap_or(0)
    }

    /// The whole conjunction. Unsatisfiable cubes are pruned as they
    /// appear so that disjunctive conjuncts do not multiply needlessly.
    pub fn conjunction(&self, cfg: &SolverConfig) -> Predicate {
        let mut acc = Predicate::truth();
        for c in &self.conjuncts {
            acc = acc.and(c);
            if acc.cubes().len() > 1 {
                acc = prune(&acc, cfg);
            }
            if acc.is_false() {
                break;
            }
        }
        acc
    }
}

impl fmt::Display for SsaFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .conjuncts
            .iter()
            .filter(|c| !c.is_true())
            .map(|c| format!("({c})"))
            .collect();
        if parts.is_empty() {
            f.write_str("true")
        } else {
            f.write_str(&parts.join(" && "))
        }
    }
}

/// Encodes a trace: assumes constrain the current versions, assignments
/// and havocs introduce the next version of their target.
pub fn encode_trace(trace: &[Operation]) -> SsaFormula {
    let mut versions: BTreeMap<Var, u32> = BTreeMap::new();
    let mut conjuncts = Vec::with_capacity(trace.len());
    let mut havocs = Vec::new();
    for (i, op) in trace.iter().enumerate() {
        let current = |v: &Var, versions: &BTreeMap<Var, u32>| {
            v.versioned(versions.get(v).copied().unwrap_or(0))
        };
        match op.kind() {
            OpKind::Assume(_) => {
                conjuncts.push(op.assume_predicate().map_vars(&|v| current(v, &versions)));
            }
            OpKind::Assign(x, _) => {
                let rhs = op
                    .rhs_linear()
                    .expect("assignment")
                    .map_vars(&|v| current(v, &versions));
                let next = versions.get(x).copied().unwrap_or(0) + 1;
                versions.insert(x.clone(), next);
                let lhs = LinExpr::var(x.versioned(next));
                conjuncts.push(Predicate::compare(CmpOp::Eq, &lhs, &rhs));
            }
            OpKind::Havoc(x) => {
                let next = versions.get(x).copied().unwrap_or(0) + 1;
                versions.insert(x.clone(), next);
                havocs.push((i, x.versioned(next)));
                conjuncts.push(Predicate::truth());
            }
        }
    }
    SsaFormula {
        conjuncts,
        versions,
        havocs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse_arith, parse_condition};
    use crate::logic::solver::is_satisfiable;

    fn assume(s: &str) -> Operation {
        Operation::assume(parse_condition(s).unwrap())
    }

    fn assign(x: &str, e: &str) -> Operation {
        Operation::assign(x, parse_arith(e).unwrap())
    }

    /// Parses a predicate over `x_0`-style names and maps them to `x@0`.
    fn ssa(s: &str) -> Predicate {
        Predicate::from_condition(&parse_condition(s).unwrap()).map_vars(&|v| {
            let (base, ver) = v.name().rsplit_once('_').unwrap();
            Var::new(base).versioned(ver.parse().unwrap())
        })
    }

    #[test]
    fn if_branch_trace() {
        let t = [assume("x>0"), assign("x", "-x"), assume("!(x!=0)")];
        let f = encode_trace(&t);
        assert_eq!(f.conjuncts[0], ssa("x_0 > 0"));
        assert_eq!(f.conjuncts[1], ssa("x_1 == -x_0"));
        assert_eq!(f.conjuncts[2], ssa("x_1 == 0"));
        assert_eq!(f.version(&Var::new("x")), 1);
        assert!(is_satisfiable(&f.conjunction(&SolverConfig::default()), &SolverConfig::default()).is_unsat());
    }

    #[test]
    fn assumes_keep_versions() {
        let t = [assume("!(x>0)"), assume("!(x>-10)"), assume("!(x!=0)")];
        let f = encode_trace(&t);
        assert!(f.versions.is_empty());
        assert_eq!(f.to_string(), "(x@0<=0) && (x@0<=-10) && (x@0==0)");
    }

    #[test]
    fn empty_trace_is_true() {
        let f = encode_trace(&[]);
        assert!(f.conjunction(&SolverConfig::default()).is_true());
        assert_eq!(f.to_string(), "true");
    }

    #[test]
    fn havoc_introduces_fresh_version() {
        let t = [Operation::havoc("y"), assume("y > 3"), assign("y", "y + 1")];
        let f = encode_trace(&t);
        assert_eq!(f.havocs, vec![(0, Var::new("y@1"))]);
        assert_eq!(f.conjuncts[1], ssa("y_1 > 3"));
        assert_eq!(f.version(&Var::new("y")), 2);
    }
}
