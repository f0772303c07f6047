//! Linear integer expressions and normalized `≤` atoms.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::lang::expr::{ArithOp, Expr, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonLinear;

/// `Σ coeff·var + constant`, with no zero coefficients stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LinExpr {
    pub coeffs: BTreeMap<Var, BigInt>,
    pub constant: BigInt,
}

impl LinExpr {
    pub fn constant(c: BigInt) -> Self {
        LinExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn var(v: Var) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(v, BigInt::one());
        LinExpr {
            coeffs,
            constant: BigInt::zero(),
        }
    }

    pub fn from_expr(e: &Expr) -> Result<Self, NonLinear> {
        Ok(match e {
            Expr::Int(v) => LinExpr::constant(v.clone()),
            Expr::Var(v) => LinExpr::var(v.clone()),
            Expr::Neg(e) => LinExpr::from_expr(e)?.scale(&-BigInt::one()),
            Expr::Arith(op, l, r) => {
                let l = LinExpr::from_expr(l)?;
                let r = LinExpr::from_expr(r)?;
                match op {
                    ArithOp::Add => l.add(&r),
                    ArithOp::Sub => l.sub(&r),
                    ArithOp::Mul => {
                        if l.coeffs.is_empty() {
                            r.scale(&l.constant)
                        } else if r.coeffs.is_empty() {
                            l.scale(&r.constant)
                        } else {
                            return Err(NonLinear);
                        }
                    }
                }
            }
            _ => return Err(NonLinear),
        })
    }

    pub fn coeff(&self, v: &Var) -> BigInt {
        self.coeffs.get(v).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, v: &Var, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(v.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(v);
        }
    }

    pub fn add(&self, other: &LinExpr) -> LinExpr {
        let mut out = self.clone();
        for (v, c) in &other.coeffs {
            out.add_term(v, c);
        }
        out.constant += &other.constant;
        out
    }

    pub fn sub(&self, other: &LinExpr) -> LinExpr {
        self.add(&other.scale(&-BigInt::one()))
    }

    pub fn scale(&self, k: &BigInt) -> LinExpr {
        if k.is_zero() {
            return LinExpr::default();
        }
        LinExpr {
            coeffs: self.coeffs.iter().map(|(v, c)| (v.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }

    /// Replaces `v` by `with`.
    pub fn substitute(&self, v: &Var, with: &LinExpr) -> LinExpr {
        match self.coeffs.get(v) {
            None => self.clone(),
            Some(c) => {
                let mut rest = self.clone();
                rest.coeffs.remove(v);
                rest.add(&with.scale(c))
            }
        }
    }

    pub fn map_vars(&self, f: &impl Fn(&Var) -> Var) -> LinExpr {
        let mut out = LinExpr::constant(self.constant.clone());
        for (v, c) in &self.coeffs {
            out.add_term(&f(v), c);
        }
        out
    }

    pub fn eval(&self, env: &impl Fn(&Var) -> BigInt) -> BigInt {
        self.coeffs
            .iter()
            .fold(self.constant.clone(), |acc, (v, c)| acc + c * env(v))
    }
}

/// The variable part of a normalized atom: sorted, nonzero, coefficient gcd 1.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinTerm(pub Vec<(Var, BigInt)>);

impl LinTerm {
    pub fn negate(&self) -> LinTerm {
        LinTerm(self.0.iter().map(|(v, c)| (v.clone(), -c)).collect())
    }

    pub fn coeff(&self, v: &Var) -> Option<&BigInt> {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .ok()
            .map(|i| &self.0[i].1)
    }

    pub fn to_lin(&self) -> LinExpr {
        LinExpr {
            coeffs: self.0.iter().cloned().collect(),
            constant: BigInt::zero(),
        }
    }

    /// True when the leading coefficient is positive.
    pub fn is_positive(&self) -> bool {
        self.0.first().is_some_and(|(_, c)| c.is_positive())
    }
}

impl fmt::Display for LinTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (v, c)) in self.0.iter().enumerate() {
            let mag = c.abs();
            if c.is_negative() {
                f.write_str("-")?;
            } else if i > 0 {
                f.write_str("+")?;
            }
            if mag.is_one() {
                write!(f, "{v}")?;
            } else {
                write!(f, "{mag}*{v}")?;
            }
        }
        Ok(())
    }
}

/// Result of normalizing `lin ≤ 0` over the integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormAtom {
    Const(bool),
    /// `term ≤ bound`
    Le(LinTerm, BigInt),
}

/// Normalizes `lin ≤ 0` into `term ≤ bound` with gcd-reduced coefficients
/// and the bound rounded down.
pub fn normalize_le(lin: &LinExpr) -> NormAtom {
    if lin.coeffs.is_empty() {
        return NormAtom::Const(!lin.constant.is_positive());
    }
    let g = lin
        .coeffs
        .values()
        .fold(BigInt::zero(), |g, c| g.gcd(c));
    let term = LinTerm(lin.coeffs.iter().map(|(v, c)| (v.clone(), c / &g)).collect());
    let bound = (-&lin.constant).div_floor(&g);
    NormAtom::Le(term, bound)
}
