//! Predicate transformers: strongest postconditions, weakest preconditions
//! and existential projection.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::linear::LinExpr;
use super::predicate::{Cube, Predicate};
use super::solver::{implies, prune, SolverConfig};
use crate::lang::expr::{OpKind, Operation, Var};

/// A transformer result together with whether it is exact. Inexact results
/// are sound over-approximations (postconditions) of the true set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Post {
    pub pred: Predicate,
    pub exact: bool,
}

/// `∃v. cube`, eliminating `v` over the integers.
///
/// Unit-coefficient equalities are substituted; otherwise Fourier–Motzkin
/// combines every lower/upper bound pair. A pair whose coefficients on `v`
/// both exceed one may drop a divisibility fact, in which case the result
/// is an over-approximation and `exact` is false.
pub fn project_cube(cube: &Cube, v: &Var) -> (Option<Cube>, bool) {
    if !cube.mentions(v) {
        return (Some(cube.clone()), true);
    }
    let atoms = cube.as_le_zero();
    let (with, without): (Vec<LinExpr>, Vec<LinExpr>) =
        atoms.into_iter().partition(|a| !a.coeff(v).is_zero());

    // Equality with a unit coefficient on v: solve and substitute.
    for (i, a) in with.iter().enumerate() {
        let c = a.coeff(v);
        if !c.abs().is_one() {
            continue;
        }
        let neg = a.scale(&-BigInt::one());
        if let Some(j) = with.iter().position(|b| *b == neg) {
            // a = 0  with  a = c·v + rest  =>  v = -c·rest
            let mut rest = a.clone();
            rest.coeffs.remove(v);
            let value = rest.scale(&-c);
            let substituted: Vec<LinExpr> = with
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != i && *k != j)
                .map(|(_, b)| b.substitute(v, &value))
                .chain(without.iter().cloned())
                .collect();
            return (Cube::from_le_zero(&substituted), true);
        }
    }

    let (upper, lower): (Vec<&LinExpr>, Vec<&LinExpr>) =
        with.iter().partition(|a| a.coeff(v).is_positive());
    let mut exact = true;
    let mut out = without;
    for u in &upper {
        let a = u.coeff(v);
        for l in &lower {
            let b = -l.coeff(v);
            if !a.is_one() && !b.is_one() {
                exact = false;
            }
            out.push(u.scale(&b).add(&l.scale(&a)));
        }
    }
    (Cube::from_le_zero(&out), exact)
}

/// `∃v. p`
pub fn exists(p: &Predicate, v: &Var) -> Post {
    let mut exact = true;
    let mut cubes = Vec::new();
    for c in p.cubes() {
        let (cube, ex) = project_cube(c, v);
        exact &= ex;
        cubes.extend(cube);
    }
    Post {
        pred: Predicate::from_cubes(cubes),
        exact,
    }
}

fn old_value(x: &Var) -> Var {
    Var::new(&format!("{x}!old"))
}

/// Strongest postcondition of `p` under `op`.
pub fn strongest_post(p: &Predicate, op: &Operation, cfg: &SolverConfig) -> Post {
    if p.is_false() {
        return Post {
            pred: Predicate::falsity(),
            exact: true,
        };
    }
    match op.kind() {
        OpKind::Assume(_) => Post {
            pred: prune(&p.and(op.assume_predicate()), cfg),
            exact: true,
        },
        OpKind::Havoc(x) => {
            let post = exists(p, x);
            Post {
                pred: prune(&post.pred, cfg),
                exact: post.exact,
            }
        }
        OpKind::Assign(x, _) => {
            let rhs = op.rhs_linear().expect("assignment");
            let a = rhs.coeff(x);
            if a.abs().is_one() {
                // x' = a·x + r  is invertible: x = a·(x' - r)
                let mut r = rhs.clone();
                r.coeffs.remove(x);
                let inverse = LinExpr::var(x.clone()).sub(&r).scale(&a);
                return Post {
                    pred: p.substitute(x, &inverse),
                    exact: true,
                };
            }
            let old = old_value(x);
            let shifted = p.substitute(x, &LinExpr::var(old.clone()));
            let new_rhs = rhs.substitute(x, &LinExpr::var(old.clone()));
            let eq = Predicate::compare(
                crate::lang::expr::CmpOp::Eq,
                &LinExpr::var(x.clone()),
                &new_rhs,
            );
            let post = exists(&shifted.and(&eq), &old);
            Post {
                pred: prune(&post.pred, cfg),
                exact: post.exact,
            }
        }
    }
}

/// Weakest precondition of `q` under `op`. Inexact steps under-approximate,
/// so the result is always a valid precondition. `None` if a negation
/// exceeds the cube cap.
pub fn weakest_pre(q: &Predicate, op: &Operation, cfg: &SolverConfig) -> Option<Predicate> {
    match op.kind() {
        OpKind::Assume(_) => {
            let not_c = op.assume_predicate().negate(cfg.max_cubes)?;
            Some(prune(&not_c.or(q), cfg))
        }
        OpKind::Assign(x, _) => Some(q.substitute(x, op.rhs_linear().expect("assignment"))),
        OpKind::Havoc(x) => {
            // ∀x. q  ==  ¬∃x. ¬q
            let not_q = q.negate(cfg.max_cubes)?;
            let ex = exists(&not_q, x);
            Some(prune(&ex.pred.negate(cfg.max_cubes)?, cfg))
        }
    }
}

/// Validity of the Hoare triple `{pre} op {post}`.
///
/// An inexact post over-approximates, so it can only fail to prove a valid
/// triple; in that case `pre ⇒ wp(post, op)` gets a second try, which is
/// exact for assignments.
pub fn hoare_valid(pre: &Predicate, op: &Operation, post: &Predicate, cfg: &SolverConfig) -> bool {
    let sp = strongest_post(pre, op, cfg);
    if implies(&sp.pred, post, cfg) {
        return true;
    }
    !sp.exact && weakest_pre(post, op, cfg).is_some_and(|wp| implies(pre, &wp, cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::{parse_arith, parse_condition};

    fn pred(s: &str) -> Predicate {
        Predicate::from_condition(&parse_condition(s).unwrap())
    }

    fn assume(s: &str) -> Operation {
        Operation::assume(parse_condition(s).unwrap())
    }

    fn assign(x: &str, e: &str) -> Operation {
        Operation::assign(x, parse_arith(e).unwrap())
    }

    fn sp(p: &str, op: &Operation) -> Post {
        strongest_post(&pred(p), op, &SolverConfig::default())
    }

    #[test]
    fn triples_survive_lost_parity() {
        // After x = -2x + 2, x is even, so it can never be -5; the projected
        // post forgets that.
        let cfg = SolverConfig::default();
        let op = assign("x", "-2*x + 2");
        assert!(!sp("true", &op).exact);
        assert!(hoare_valid(&pred("true"), &op, &pred("x != -5"), &cfg));
        assert!(!hoare_valid(&pred("true"), &op, &pred("x != -4"), &cfg));
    }

    #[test]
    fn assume_conjoins() {
        assert_eq!(sp("true", &assume("!(x>0)")).pred, pred("x <= 0"));
        assert_eq!(sp("x <= 0", &assume("true")).pred, pred("x <= 0"));
        assert!(sp("x <= -10", &assume("!(x != 0)")).pred.is_false());
    }

    #[test]
    fn invertible_assignment() {
        assert_eq!(sp("x <= 0", &assign("x", "x-1")).pred, pred("x <= -1"));
        assert_eq!(sp("x >= 1", &assign("x", "-x")).pred, pred("x <= -1"));
        assert_eq!(sp("x == y", &assign("x", "x+y")).pred, pred("x == 2*y"));
    }

    #[test]
    fn non_invertible_assignment_projects_old_value() {
        // y >= x_old with x_old <= 0 constrains nothing once x_old is gone.
        let post = sp("x <= 0 && y >= x", &assign("x", "5"));
        assert!(post.exact);
        assert_eq!(post.pred, pred("x == 5"));
        let post = sp("x >= 3 && y == x", &assign("x", "2*y"));
        assert!(post.exact);
        assert_eq!(post.pred, pred("y >= 3 && x == 2*y"));
    }

    #[test]
    fn divisibility_loss_is_flagged() {
        // ∃x'. y = 2x' keeps only "y even", which atoms cannot express.
        let post = sp("y == 2*x", &assign("x", "0"));
        assert!(!post.exact);
        assert_eq!(post.pred, pred("x == 0"));
    }

    #[test]
    fn havoc_forgets_variable() {
        let post = sp("x >= 1 && y == x + 2", &Operation::havoc("x"));
        assert!(post.exact);
        assert_eq!(post.pred, pred("y >= 3"));
    }

    #[test]
    fn weakest_pre_substitutes() {
        let cfg = SolverConfig::default();
        let wp = weakest_pre(&pred("x <= 0"), &assign("x", "x-1"), &cfg).unwrap();
        assert_eq!(wp, pred("x <= 1"));
        let wp = weakest_pre(&pred("false"), &assume("x == 0"), &cfg).unwrap();
        assert_eq!(wp, pred("x != 0"));
        let wp = weakest_pre(&pred("x >= 0 || y >= 0"), &Operation::havoc("x"), &cfg).unwrap();
        assert_eq!(wp, pred("y >= 0"));
    }

    #[test]
    fn loop_exit_self_loop_triples() {
        let cfg = SolverConfig::default();
        assert!(hoare_valid(&pred("x <= 0"), &assign("x", "x-1"), &pred("x <= 0"), &cfg));
        assert!(hoare_valid(&pred("x <= 0"), &assume("x > -10"), &pred("x <= 0"), &cfg));
        assert!(!hoare_valid(&pred("x <= 0"), &assign("x", "-x"), &pred("x <= 0"), &cfg));
    }
}
