//! Quantifier-free linear integer predicates in canonical disjunctive form.
//!
//! Every atom is kept as `Σ cᵢ·xᵢ ≤ k` with gcd-reduced coefficients; strict
//! comparisons, equalities and their negations are rewritten into that shape
//! over the integers (`t < k` is `t ≤ k-1`, `t = k` is a pair, `t ≠ k` splits
//! into two cubes). Cubes keep only the tightest bound per term, so two
//! predicates built from the same constraints compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use super::linear::{normalize_le, LinExpr, LinTerm, NormAtom};
use crate::lang::expr::{CmpOp, Expr, Var};

/// A conjunction of `term ≤ bound` atoms, one per term.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cube {
    atoms: BTreeMap<LinTerm, BigInt>,
}

impl Cube {
    pub fn atoms(&self) -> impl Iterator<Item = (&LinTerm, &BigInt)> {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Conjoins `term ≤ bound`; returns false if the cube became
    /// syntactically contradictory.
    pub fn add(&mut self, term: LinTerm, bound: BigInt) -> bool {
        if let Some(other) = self.atoms.get(&term.negate()) {
            if &bound + other < BigInt::from(0) {
                return false;
            }
        }
        match self.atoms.get_mut(&term) {
            Some(b) if *b <= bound => {}
            Some(b) => *b = bound,
            None => {
                self.atoms.insert(term, bound);
            }
        }
        true
    }

    /// Conjoins `lin ≤ 0`.
    pub fn add_le(&mut self, lin: &LinExpr) -> bool {
        match normalize_le(lin) {
            NormAtom::Const(b) => b,
            NormAtom::Le(t, b) => self.add(t, b),
        }
    }

    pub fn conjoin(&self, other: &Cube) -> Option<Cube> {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (t, b) in &small.atoms {
            if !big.add(t.clone(), b.clone()) {
                return None;
            }
        }
        Some(big)
    }

    /// Syntactic entailment: every atom of `other` is matched by an atom
    /// of `self` on the same term with an equal or tighter bound.
    pub fn entails(&self, other: &Cube) -> bool {
        other
            .atoms
            .iter()
            .all(|(t, b)| self.atoms.get(t).is_some_and(|mine| mine <= b))
    }

    pub fn without(&self, term: &LinTerm) -> Cube {
        let mut c = self.clone();
        c.atoms.remove(term);
        c
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.atoms
            .keys()
            .flat_map(|t| t.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.atoms.keys().any(|t| t.coeff(v).is_some())
    }

    /// Atoms as `lin ≤ 0` expressions.
    pub fn as_le_zero(&self) -> Vec<LinExpr> {
        self.atoms
            .iter()
            .map(|(t, b)| {
                let mut l = t.to_lin();
                l.constant = -b;
                l
            })
            .collect()
    }

    pub fn from_le_zero<'a>(atoms: impl IntoIterator<Item = &'a LinExpr>) -> Option<Cube> {
        let mut c = Cube::default();
        for a in atoms {
            if !c.add_le(a) {
                return None;
            }
        }
        Some(c)
    }

    pub fn eval(&self, env: &impl Fn(&Var) -> BigInt) -> bool {
        self.atoms.iter().all(|(t, b)| &t.to_lin().eval(env) <= b)
    }

    fn fmt_atoms(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (t, b) in &self.atoms {
            let neg = t.negate();
            let paired = self.atoms.get(&neg).is_some_and(|nb| *nb == -b);
            if paired && !t.is_positive() {
                continue;
            }
            if !first {
                f.write_str("&&")?;
            }
            first = false;
            if paired {
                write!(f, "{t}=={b}")?;
            } else if t.is_positive() {
                write!(f, "{t}<={b}")?;
            } else {
                write!(f, "{neg}>={}", -b)?;
            }
        }
        Ok(())
    }
}

/// A disjunction of cubes. No cubes means `false`; a single empty cube
/// means `true`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Predicate {
    cubes: Vec<Cube>,
}

impl Predicate {
    pub fn truth() -> Self {
        Predicate {
            cubes: vec![Cube::default()],
        }
    }

    pub fn falsity() -> Self {
        Predicate { cubes: Vec::new() }
    }

    pub fn is_true(&self) -> bool {
        self.cubes.len() == 1 && self.cubes[0].is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn from_cube(c: Cube) -> Self {
        Predicate { cubes: vec![c] }
    }

    /// Canonicalizes an arbitrary set of cubes: drops cubes entailed by
    /// others (they are redundant in a disjunction), sorts, dedups.
    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Self {
        let mut cubes: Vec<Cube> = cubes.into_iter().collect();
        cubes.sort();
        cubes.dedup();
        if cubes.iter().any(Cube::is_empty) {
            return Predicate::truth();
        }
        let mut keep = vec![true; cubes.len()];
        for i in 0..cubes.len() {
            for j in 0..cubes.len() {
                if i != j && keep[j] && cubes[i].entails(&cubes[j]) {
                    keep[i] = false;
                    break;
                }
            }
        }
        Predicate {
            cubes: cubes
                .into_iter()
                .zip(keep)
                .filter_map(|(c, k)| k.then_some(c))
                .collect(),
        }
    }

    /// `lin ≤ 0`
    pub fn le_zero(lin: &LinExpr) -> Self {
        match Cube::from_le_zero([lin]) {
            Some(c) => Predicate::from_cube(c),
            None => Predicate::falsity(),
        }
    }

    /// `lhs ⋈ rhs` over the integers.
    pub fn compare(op: CmpOp, lhs: &LinExpr, rhs: &LinExpr) -> Self {
        let d = lhs.sub(rhs);
        let one = LinExpr::constant(BigInt::one());
        let neg = d.scale(&-BigInt::one());
        match op {
            CmpOp::Le => Predicate::le_zero(&d),
            CmpOp::Lt => Predicate::le_zero(&d.add(&one)),
            CmpOp::Ge => Predicate::le_zero(&neg),
            CmpOp::Gt => Predicate::le_zero(&neg.add(&one)),
            CmpOp::Eq => match Cube::from_le_zero([&d, &neg]) {
                Some(c) => Predicate::from_cube(c),
                None => Predicate::falsity(),
            },
            CmpOp::Ne => Predicate::le_zero(&d.add(&one)).or(&Predicate::le_zero(&neg.add(&one))),
        }
    }

    /// Converts a condition expression. Arithmetic inside comparisons must
    /// be linear.
    pub fn from_condition(e: &Expr) -> Self {
        Self::from_condition_signed(e, false)
    }

    fn from_condition_signed(e: &Expr, negate: bool) -> Self {
        match e {
            Expr::Bool(b) => {
                if *b != negate {
                    Predicate::truth()
                } else {
                    Predicate::falsity()
                }
            }
            Expr::Not(inner) => Self::from_condition_signed(inner, !negate),
            Expr::And(l, r) | Expr::Or(l, r) => {
                let l = Self::from_condition_signed(l, negate);
                let r = Self::from_condition_signed(r, negate);
                if matches!(e, Expr::And(..)) != negate {
                    l.and(&r)
                } else {
                    l.or(&r)
                }
            }
            Expr::Cmp(op, l, r) => {
                let l = LinExpr::from_expr(l).expect("linear comparison operand");
                let r = LinExpr::from_expr(r).expect("linear comparison operand");
                let op = if negate {
                    match op {
                        CmpOp::Eq => CmpOp::Ne,
                        CmpOp::Ne => CmpOp::Eq,
                        CmpOp::Lt => CmpOp::Ge,
                        CmpOp::Le => CmpOp::Gt,
                        CmpOp::Gt => CmpOp::Le,
                        CmpOp::Ge => CmpOp::Lt,
                    }
                } else {
                    *op
                };
                Predicate::compare(op, &l, &r)
            }
            _ => panic!("arithmetic expression in condition position: {e}"),
        }
    }

    pub fn and(&self, other: &Predicate) -> Predicate {
        if self.is_true() {
            return other.clone();
        }
        if other.is_true() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.cubes.len() * other.cubes.len());
        for a in &self.cubes {
            for b in &other.cubes {
                if let Some(c) = a.conjoin(b) {
                    out.push(c);
                }
            }
        }
        Predicate::from_cubes(out)
    }

    pub fn or(&self, other: &Predicate) -> Predicate {
        Predicate::from_cubes(self.cubes.iter().chain(&other.cubes).cloned())
    }

    /// Negation, distributed back into disjunctive form. Returns `None` if
    /// more than `cap` cubes would be needed.
    pub fn negate(&self, cap: usize) -> Option<Predicate> {
        let mut acc = Predicate::truth();
        for cube in &self.cubes {
            let mut negated = Vec::new();
            for (t, b) in cube.atoms() {
                let mut c = Cube::default();
                c.add(t.negate(), -b - BigInt::one());
                negated.push(c);
            }
            acc = acc.and(&Predicate::from_cubes(negated));
            if acc.cubes.len() > cap {
                return None;
            }
        }
        Some(acc)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.cubes.iter().flat_map(Cube::vars).collect()
    }

    pub fn mentions(&self, v: &Var) -> bool {
        self.cubes.iter().any(|c| c.mentions(v))
    }

    /// Replaces `v` by `with` everywhere.
    pub fn substitute(&self, v: &Var, with: &LinExpr) -> Predicate {
        if !self.mentions(v) {
            return self.clone();
        }
        let cubes = self.cubes.iter().filter_map(|c| {
            let atoms: Vec<LinExpr> = c.as_le_zero().iter().map(|a| a.substitute(v, with)).collect();
            Cube::from_le_zero(&atoms)
        });
        Predicate::from_cubes(cubes)
    }

    pub fn map_vars(&self, f: &impl Fn(&Var) -> Var) -> Predicate {
        let cubes = self.cubes.iter().filter_map(|c| {
            let atoms: Vec<LinExpr> = c.as_le_zero().iter().map(|a| a.map_vars(f)).collect();
            Cube::from_le_zero(&atoms)
        });
        Predicate::from_cubes(cubes)
    }

    pub fn eval(&self, env: &impl Fn(&Var) -> BigInt) -> bool {
        self.cubes.iter().any(|c| c.eval(env))
    }

    /// Total number of atoms across cubes.
    pub fn size(&self) -> usize {
        self.cubes.iter().map(Cube::len).sum()
    }

    /// A copy with one atom removed from one cube.
    pub fn drop_atom(&self, cube: usize, term: &LinTerm) -> Predicate {
        let mut cubes = self.cubes.clone();
        cubes[cube] = cubes[cube].without(term);
        Predicate::from_cubes(cubes)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_false() {
            return f.write_str("false");
        }
        if self.is_true() {
            return f.write_str("true");
        }
        for (i, c) in self.cubes.iter().enumerate() {
            if i > 0 {
                f.write_str("||")?;
            }
            c.fmt_atoms(f)?;
        }
        Ok(())
    }
}
