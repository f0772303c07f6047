//! Builtin decision procedure for linear integer arithmetic.
//!
//! Unit-coefficient equalities are substituted away first. The remaining
//! system goes through Fourier–Motzkin elimination with gcd tightening of
//! every derived row; a rational witness is rebuilt by back-substitution,
//! preferring integers, and non-integral coordinates are resolved by
//! branch-and-bound.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::predicate::{Cube, Predicate};
use crate::lang::expr::Var;

pub type Model = BTreeMap<Var, BigInt>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatResult {
    Sat(Model),
    Unsat,
    Unknown,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Sat(_))
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, SatResult::Unsat)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Maximum branch-and-bound depth before giving up.
    pub max_depth: usize,
    /// Maximum number of disjuncts a predicate may expand to.
    pub max_cubes: usize,
    /// Maximum rows kept during one elimination step.
    pub max_rows: usize,
    /// Maximum branch-and-bound nodes per cube.
    pub max_nodes: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_depth: 64,
            max_cubes: 4096,
            max_rows: 20_000,
            max_nodes: 20_000,
        }
    }
}

/// Decides satisfiability of a predicate.
pub fn is_satisfiable(p: &Predicate, cfg: &SolverConfig) -> SatResult {
    if p.cubes().len() > cfg.max_cubes {
        return SatResult::Unknown;
    }
    let mut unknown = false;
    for cube in p.cubes() {
        match solve_cube(cube, cfg) {
            SatResult::Sat(m) => return SatResult::Sat(m),
            SatResult::Unknown => unknown = true,
            SatResult::Unsat => {}
        }
    }
    if unknown {
        SatResult::Unknown
    } else {
        SatResult::Unsat
    }
}

/// `p ⇒ q`, i.e. `p ∧ ¬q` unsatisfiable. Unknown counts as not implied.
pub fn implies(p: &Predicate, q: &Predicate, cfg: &SolverConfig) -> bool {
    if q.is_true() || p.is_false() {
        return true;
    }
    for c in p.cubes() {
        if q.cubes().iter().any(|d| c.entails(d)) {
            continue;
        }
        // c ∧ ¬d for every cube d of q, distributed with syntactic pruning.
        let mut acc = vec![c.clone()];
        for d in q.cubes() {
            let mut next = Vec::new();
            for a in &acc {
                for (t, b) in d.atoms() {
                    let mut n = a.clone();
                    if n.add(t.negate(), -b - BigInt::one()) {
                        next.push(n);
                    }
                }
            }
            acc = Predicate::from_cubes(next).cubes().to_vec();
            if acc.len() > cfg.max_cubes {
                return false;
            }
        }
        if acc.iter().any(|cube| !solve_cube(cube, cfg).is_unsat()) {
            return false;
        }
    }
    true
}

/// Drops cubes that are definitely unsatisfiable.
pub fn prune(p: &Predicate, cfg: &SolverConfig) -> Predicate {
    if p.is_true() || p.is_false() {
        return p.clone();
    }
    Predicate::from_cubes(
        p.cubes()
            .iter()
            .filter(|c| !solve_cube(c, cfg).is_unsat())
            .cloned(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Row {
    coeffs: Vec<BigInt>,
    bound: BigInt,
}

impl Row {
    /// gcd-normalizes; `None` for rows with no variables (with their truth).
    fn normalize(mut self) -> Result<Row, bool> {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return Err(!self.bound.is_negative());
        }
        if !g.is_one() {
            for c in &mut self.coeffs {
                *c /= &g;
            }
            self.bound = self.bound.div_floor(&g);
        }
        Ok(self)
    }
}

pub fn solve_cube(cube: &Cube, cfg: &SolverConfig) -> SatResult {
    let vars: Vec<Var> = cube.vars().into_iter().collect();
    let index: HashMap<&Var, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let rows: Vec<Row> = cube
        .atoms()
        .map(|(t, b)| {
            let mut coeffs = vec![BigInt::zero(); vars.len()];
            for (v, c) in &t.0 {
                coeffs[index[v]] = c.clone();
            }
            Row {
                coeffs,
                bound: b.clone(),
            }
        })
        .collect();
    let mut nodes = 0;
    match solve_rows(rows, vars.len(), 0, cfg, &mut nodes) {
        Outcome::Sat(vals) => SatResult::Sat(vars.into_iter().zip(vals).collect()),
        Outcome::Unsat => SatResult::Unsat,
        Outcome::Unknown => SatResult::Unknown,
    }
}

enum Outcome {
    Sat(Vec<BigInt>),
    Unsat,
    Unknown,
}

/// `x_var = constant + Σ coeffs·x`
struct Substitution {
    var: usize,
    coeffs: Vec<BigInt>,
    constant: BigInt,
}

fn normalize_rows(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut best: HashMap<Vec<BigInt>, BigInt> = HashMap::new();
    let mut order = Vec::new();
    for r in rows {
        match r.normalize() {
            Err(true) => {}
            Err(false) => return None,
            Ok(r) => match best.get_mut(&r.coeffs) {
                Some(b) => {
                    if r.bound < *b {
                        *b = r.bound;
                    }
                }
                None => {
                    order.push(r.coeffs.clone());
                    best.insert(r.coeffs, r.bound);
                }
            },
        }
    }
    // Opposite rows with crossing bounds are an immediate contradiction.
    for coeffs in &order {
        let neg: Vec<BigInt> = coeffs.iter().map(|c| -c).collect();
        if let (Some(b1), Some(b2)) = (best.get(coeffs), best.get(&neg)) {
            if b1 + b2 < BigInt::zero() {
                return None;
            }
        }
    }
    Some(
        order
            .into_iter()
            .map(|coeffs| {
                let bound = best[&coeffs].clone();
                Row { coeffs, bound }
            })
            .collect(),
    )
}

fn find_unit_equality(rows: &[Row]) -> Option<(usize, usize, usize)> {
    let lookup: HashMap<&Vec<BigInt>, usize> =
        rows.iter().enumerate().map(|(i, r)| (&r.coeffs, i)).collect();
    for (i, r) in rows.iter().enumerate() {
        let neg: Vec<BigInt> = r.coeffs.iter().map(|c| -c).collect();
        if let Some(&j) = lookup.get(&neg) {
            if rows[j].bound == -&r.bound {
                if let Some(k) = r.coeffs.iter().position(|c| c.abs().is_one()) {
                    return Some((i, j, k));
                }
            }
        }
    }
    None
}

fn apply_substitution(row: &Row, s: &Substitution) -> Row {
    let a = &row.coeffs[s.var];
    if a.is_zero() {
        return row.clone();
    }
    let mut coeffs = row.coeffs.clone();
    coeffs[s.var] = BigInt::zero();
    for (c, e) in coeffs.iter_mut().zip(&s.coeffs) {
        *c += a * e;
    }
    Row {
        coeffs,
        bound: &row.bound - a * &s.constant,
    }
}

fn solve_rows(
    rows: Vec<Row>,
    n: usize,
    depth: usize,
    cfg: &SolverConfig,
    nodes: &mut usize,
) -> Outcome {
    *nodes += 1;
    if *nodes > cfg.max_nodes {
        return Outcome::Unknown;
    }
    let Some(mut rows) = normalize_rows(rows) else {
        return Outcome::Unsat;
    };

    // Substitute unit-coefficient equalities.
    let mut subs: Vec<Substitution> = Vec::new();
    while let Some((i, j, k)) = find_unit_equality(&rows) {
        let r = &rows[i];
        // c_k x_k + Σ c x = b  =>  x_k = c_k (b - Σ c x)
        let ck = r.coeffs[k].clone();
        let mut coeffs: Vec<BigInt> = r.coeffs.iter().map(|c| -c * &ck).collect();
        coeffs[k] = BigInt::zero();
        let s = Substitution {
            var: k,
            coeffs,
            constant: &r.bound * &ck,
        };
        let rest: Vec<Row> = rows
            .iter()
            .enumerate()
            .filter(|(idx, _)| *idx != i && *idx != j)
            .map(|(_, row)| apply_substitution(row, &s))
            .collect();
        subs.push(s);
        match normalize_rows(rest) {
            Some(r) => rows = r,
            None => return Outcome::Unsat,
        }
    }

    // Fourier–Motzkin elimination, recording each variable's rows.
    let mut levels: Vec<(usize, Vec<Row>)> = Vec::new();
    let mut current = rows.clone();
    loop {
        let mut best: Option<(usize, usize)> = None;
        for v in 0..n {
            let (mut pos, mut neg) = (0usize, 0usize);
            for r in &current {
                if r.coeffs[v].is_positive() {
                    pos += 1;
                } else if r.coeffs[v].is_negative() {
                    neg += 1;
                }
            }
            if pos + neg == 0 {
                continue;
            }
            let cost = pos * neg;
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((v, cost));
            }
        }
        let Some((v, _)) = best else { break };
        let (with, without): (Vec<Row>, Vec<Row>) =
            current.into_iter().partition(|r| !r.coeffs[v].is_zero());
        let mut next = without;
        for up in with.iter().filter(|r| r.coeffs[v].is_positive()) {
            for lo in with.iter().filter(|r| r.coeffs[v].is_negative()) {
                let a = up.coeffs[v].clone();
                let b = -lo.coeffs[v].clone();
                let coeffs: Vec<BigInt> = up
                    .coeffs
                    .iter()
                    .zip(&lo.coeffs)
                    .map(|(u, l)| u * &b + l * &a)
                    .collect();
                next.push(Row {
                    coeffs,
                    bound: &up.bound * &b + &lo.bound * &a,
                });
            }
        }
        levels.push((v, with));
        match normalize_rows(next) {
            Some(r) if r.len() <= cfg.max_rows => current = r,
            Some(_) => return Outcome::Unknown,
            None => return Outcome::Unsat,
        }
    }

    // Back-substitution over the rationals, preferring integers near zero.
    let mut values: Vec<Option<BigRational>> = vec![None; n];
    for (v, level_rows) in levels.iter().rev() {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for r in level_rows {
            let mut rest = BigRational::from_integer(r.bound.clone());
            for (j, c) in r.coeffs.iter().enumerate() {
                if j != *v && !c.is_zero() {
                    let val = values[j].clone().unwrap_or_else(BigRational::zero);
                    rest -= BigRational::from_integer(c.clone()) * val;
                }
            }
            let lim = rest / BigRational::from_integer(r.coeffs[*v].clone());
            if r.coeffs[*v].is_positive() {
                if hi.as_ref().is_none_or(|h| lim < *h) {
                    hi = Some(lim);
                }
            } else if lo.as_ref().is_none_or(|l| lim > *l) {
                lo = Some(lim);
            }
        }
        values[*v] = Some(pick_value(lo, hi));
    }
    let values: Vec<BigRational> = values
        .into_iter()
        .map(|v| v.unwrap_or_else(BigRational::zero))
        .collect();

    if let Some(k) = values.iter().position(|v| !v.is_integer()) {
        if depth >= cfg.max_depth {
            return Outcome::Unknown;
        }
        let q = &values[k];
        let mut down = rows.clone();
        let mut unit = vec![BigInt::zero(); n];
        unit[k] = BigInt::one();
        down.push(Row {
            coeffs: unit.clone(),
            bound: q.floor().to_integer(),
        });
        let mut up = rows;
        unit[k] = -BigInt::one();
        up.push(Row {
            coeffs: unit,
            bound: -q.ceil().to_integer(),
        });
        let first = solve_rows(down, n, depth + 1, cfg, nodes);
        let vals = match first {
            Outcome::Sat(v) => v,
            other => match (other, solve_rows(up, n, depth + 1, cfg, nodes)) {
                (_, Outcome::Sat(v)) => v,
                (Outcome::Unsat, Outcome::Unsat) => return Outcome::Unsat,
                _ => return Outcome::Unknown,
            },
        };
        return Outcome::Sat(finish_subs(vals, &subs));
    }
    let ints = values.into_iter().map(|v| v.to_integer()).collect();
    Outcome::Sat(finish_subs(ints, &subs))
}

fn finish_subs(mut vals: Vec<BigInt>, subs: &[Substitution]) -> Vec<BigInt> {
    for s in subs.iter().rev() {
        let v = s
            .coeffs
            .iter()
            .zip(&vals)
            .fold(s.constant.clone(), |acc, (c, x)| acc + c * x);
        vals[s.var] = v;
    }
    vals
}

fn pick_value(lo: Option<BigRational>, hi: Option<BigRational>) -> BigRational {
    let zero = BigRational::zero();
    match (lo, hi) {
        (None, None) => zero,
        (Some(l), None) => {
            let c = l.ceil();
            if c < zero {
                zero
            } else {
                c
            }
        }
        (None, Some(h)) => {
            let f = h.floor();
            if f > zero {
                zero
            } else {
                f
            }
        }
        (Some(l), Some(h)) => {
            let (c, f) = (l.ceil(), h.floor());
            if c <= f {
                if c > zero {
                    c
                } else if f < zero {
                    f
                } else {
                    zero
                }
            } else {
                l
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_condition;

    fn pred(s: &str) -> Predicate {
        Predicate::from_condition(&parse_condition(s).unwrap())
    }

    fn sat(s: &str) -> SatResult {
        is_satisfiable(&pred(s), &SolverConfig::default())
    }

    fn assert_model(s: &str) {
        let p = pred(s);
        match is_satisfiable(&p, &SolverConfig::default()) {
            SatResult::Sat(m) => {
                let env = |v: &Var| m.get(v).cloned().unwrap_or_default();
                assert!(p.eval(&env), "{s}: bad model {m:?}");
            }
            other => panic!("{s}: {other:?}"),
        }
    }

    #[test]
    fn simple_verdicts() {
        assert_eq!(sat("x <= 0 && x >= 1"), SatResult::Unsat);
        assert_model("x >= 3 && x <= 3");
        assert_model("x + y == 10 && x - y == 2");
        assert_eq!(sat("x + y == 10 && x - y == 3"), SatResult::Unsat);
    }

    #[test]
    fn integer_reasoning_beyond_rationals() {
        // Rationally feasible (x = 1/2), integrally infeasible.
        assert_eq!(sat("2*x >= 1 && 2*x <= 1"), SatResult::Unsat);
        assert_eq!(sat("3*x + 3*y == 1"), SatResult::Unsat);
        assert_eq!(sat("2*x - 2*y >= 1 && 2*x - 2*y <= 1"), SatResult::Unsat);
        assert_eq!(sat("4*x - 2*y >= 1 && 4*x - 2*y <= 1"), SatResult::Unsat);
        assert_model("3*x + 5*y == 11 && x >= 0 && y >= 0 && x <= 10");
        assert_eq!(sat("3*x + 5*y == 7 && x >= 0 && y >= 0"), SatResult::Unsat);
        assert_eq!(sat("3*x + 5*y == 7 && x >= 0 && y >= 0 && x <= 1"), SatResult::Unsat);
    }

    #[test]
    fn disjunctions_and_disequalities() {
        assert_model("x != 0 && x <= 1 && x >= -1 && x != 1");
        assert_eq!(sat("x != 0 && x >= 0 && x <= 0"), SatResult::Unsat);
        assert_model("x <= -5 || x >= 5 && y == x");
    }

    #[test]
    fn notzero_branch_formulas() {
        // The if-branch encoding: x0 > 0, x1 = -x0, x1 == 0
        assert_eq!(sat("x0 > 0 && x1 == -x0 && !(x1 != 0)"), SatResult::Unsat);
        assert_eq!(sat("!(x0 > 0) && !(x0 > -10) && !(x0 != 0)"), SatResult::Unsat);
        assert_model("x0 > 0 && x1 == -x0 && x1 != 0");
    }

    #[test]
    fn implication() {
        let cfg = SolverConfig::default();
        assert!(implies(&pred("x <= -10"), &pred("x <= 0"), &cfg));
        assert!(!implies(&pred("x <= 0"), &pred("x <= -10"), &cfg));
        assert!(implies(&pred("x == 0"), &pred("x <= 0 && x >= 0"), &cfg));
        assert!(implies(&pred("x >= 1 && y == x"), &pred("y != 0"), &cfg));
        assert!(implies(&pred("false"), &pred("x == 1"), &cfg));
        assert!(!implies(&pred("x <= 5 || x >= 9"), &pred("x <= 5"), &cfg));
    }

    #[test]
    fn unknown_when_depth_exhausted() {
        let cfg = SolverConfig {
            max_depth: 0,
            ..SolverConfig::default()
        };
        // The first rational witness (x = 0, y = 7/3) forces a branch.
        let p = pred("2*x + 3*y == 7");
        assert_eq!(is_satisfiable(&p, &cfg), SatResult::Unknown);
        assert!(is_satisfiable(&p, &SolverConfig::default()).is_sat());
    }
}
