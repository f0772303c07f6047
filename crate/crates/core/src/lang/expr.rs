//! Expression trees and operations of the input language.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;

use crate::logic::linear::LinExpr;
use crate::logic::predicate::Predicate;

/// A program variable. Cheap to clone; ordered by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// The SSA copy of this variable at `version`.
    pub fn versioned(&self, version: u32) -> Var {
        Var::new(&format!("{}@{}", self.0, version))
    }

    /// Splits an SSA name `x@3` back into `(x, 3)`.
    pub fn unversioned(&self) -> Option<(Var, u32)> {
        let (base, ver) = self.0.rsplit_once('@')?;
        Some((Var::new(base), ver.parse().ok()?))
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }

    pub fn holds(self, lhs: &BigInt, rhs: &BigInt) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Gt => lhs > rhs,
            CmpOp::Ge => lhs >= rhs,
        }
    }
}

/// Arithmetic and boolean expressions. Boolean nodes only appear in
/// condition position; the parser enforces this.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Var(Var),
    Neg(Box<Expr>),
    Arith(ArithOp, Box<Expr>, Box<Expr>),
    Bool(bool),
    Cmp(CmpOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Int(BigInt::from(v))
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(Var::new(name))
    }

    pub fn negation(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn cmp(op: CmpOp, l: Expr, r: Expr) -> Expr {
        Expr::Cmp(op, Box::new(l), Box::new(r))
    }

    pub fn arith(op: ArithOp, l: Expr, r: Expr) -> Expr {
        Expr::Arith(op, Box::new(l), Box::new(r))
    }

    /// True for expressions that mention no variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Int(_) | Expr::Bool(_) => true,
            Expr::Var(_) => false,
            Expr::Neg(e) | Expr::Not(e) => e.is_constant(),
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::And(l, r) | Expr::Or(l, r) => {
                l.is_constant() && r.is_constant()
            }
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Expr::Int(_) | Expr::Bool(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(e) | Expr::Not(e) => e.collect_vars(out),
            Expr::Arith(_, l, r) | Expr::Cmp(_, l, r) | Expr::And(l, r) | Expr::Or(l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    fn is_boolean(&self) -> bool {
        matches!(
            self,
            Expr::Bool(_) | Expr::Cmp(..) | Expr::Not(_) | Expr::And(..) | Expr::Or(..)
        )
    }

    fn fmt_arith(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(e) => {
                f.write_str("-")?;
                wrap_if(f, e, !matches!(**e, Expr::Int(_) | Expr::Var(_) | Expr::Neg(_)))
            }
            Expr::Arith(op, l, r) => match op {
                ArithOp::Add | ArithOp::Sub => {
                    l.fmt_arith(f)?;
                    f.write_str(if *op == ArithOp::Add { "+" } else { "-" })?;
                    wrap_if(f, r, matches!(**r, Expr::Arith(ArithOp::Add | ArithOp::Sub, ..)))
                }
                ArithOp::Mul => {
                    wrap_if(f, l, matches!(**l, Expr::Arith(ArithOp::Add | ArithOp::Sub, ..)))?;
                    f.write_str("*")?;
                    wrap_if(f, r, matches!(**r, Expr::Arith(..)))
                }
            },
            _ => unreachable!("boolean node in arithmetic position"),
        }
    }
}

fn wrap_if(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        f.write_str("(")?;
        write!(f, "{e}")?;
        f.write_str(")")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_boolean() {
            return self.fmt_arith(f);
        }
        match self {
            Expr::Bool(b) => write!(f, "{b}"),
            Expr::Cmp(op, l, r) => {
                l.fmt_arith(f)?;
                f.write_str(op.symbol())?;
                r.fmt_arith(f)
            }
            Expr::Not(e) => {
                f.write_str("!(")?;
                write!(f, "{e}")?;
                f.write_str(")")
            }
            Expr::And(l, r) => {
                wrap_if(f, l, matches!(**l, Expr::Or(..)))?;
                f.write_str("&&")?;
                wrap_if(f, r, matches!(**r, Expr::Or(..) | Expr::And(..)))
            }
            Expr::Or(l, r) => {
                write!(f, "{l}")?;
                f.write_str("||")?;
                wrap_if(f, r, matches!(**r, Expr::Or(..)))
            }
            _ => unreachable!(),
        }
    }
}

/// What an operation does.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Assume(Expr),
    Assign(Var, Expr),
    /// Assign an arbitrary integer.
    Havoc(Var),
}

struct OpInner {
    kind: OpKind,
    text: String,
    assume_pred: OnceLock<Predicate>,
    rhs_lin: OnceLock<LinExpr>,
}

/// A letter of the automaton alphabet. Identity is the canonical text.
#[derive(Clone)]
pub struct Operation(Arc<OpInner>);

impl Operation {
    pub fn new(kind: OpKind) -> Self {
        let text = match &kind {
            OpKind::Assume(c) => c.to_string(),
            OpKind::Assign(x, e) => format!("{x}={e};"),
            OpKind::Havoc(x) => format!("havoc {x};"),
        };
        Operation(Arc::new(OpInner {
            kind,
            text,
            assume_pred: OnceLock::new(),
            rhs_lin: OnceLock::new(),
        }))
    }

    pub fn assume(cond: Expr) -> Self {
        Operation::new(OpKind::Assume(cond))
    }

    pub fn assign(target: &str, rhs: Expr) -> Self {
        Operation::new(OpKind::Assign(Var::new(target), rhs))
    }

    pub fn havoc(target: &str) -> Self {
        Operation::new(OpKind::Havoc(Var::new(target)))
    }

    pub fn kind(&self) -> &OpKind {
        &self.0.kind
    }

    pub fn text(&self) -> &str {
        &self.0.text
    }

    /// The assumed condition as a predicate; `true` for other kinds.
    pub fn assume_predicate(&self) -> &Predicate {
        self.0.assume_pred.get_or_init(|| match &self.0.kind {
            OpKind::Assume(c) => Predicate::from_condition(c),
            _ => Predicate::truth(),
        })
    }

    /// The right-hand side of an assignment in linear form.
    pub fn rhs_linear(&self) -> Option<&LinExpr> {
        match &self.0.kind {
            OpKind::Assign(_, e) => Some(self.0.rhs_lin.get_or_init(|| {
                LinExpr::from_expr(e).expect("assignment right-hand sides are linear")
            })),
            _ => None,
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        match &self.0.kind {
            OpKind::Assume(c) => c.collect_vars(&mut out),
            OpKind::Assign(x, e) => {
                out.insert(x.clone());
                e.collect_vars(&mut out);
            }
            OpKind::Havoc(x) => {
                out.insert(x.clone());
            }
        }
        out
    }
}

impl PartialEq for Operation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.text == other.0.text
    }
}

impl Eq for Operation {}

impl Hash for Operation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.text.hash(state)
    }
}

impl PartialOrd for Operation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Operation {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.text.cmp(&other.0.text)
    }
}

impl fmt::Debug for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.0.text)
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parser::parse_condition;

    #[test]
    fn canonical_text_style() {
        let c = parse_condition("x > 0").unwrap();
        assert_eq!(Operation::assume(c.clone()).text(), "x>0");
        assert_eq!(Operation::assume(Expr::negation(c)).text(), "!(x>0)");
        let neg = Expr::Neg(Box::new(Expr::var("x")));
        assert_eq!(Operation::assign("x", neg).text(), "x=-x;");
        let dec = Expr::arith(ArithOp::Sub, Expr::var("x"), Expr::int(1));
        assert_eq!(Operation::assign("x", dec).text(), "x=x-1;");
        assert_eq!(Operation::havoc("y").text(), "havoc y;");
    }

    #[test]
    fn rendering_keeps_needed_parentheses() {
        for src in ["x-(y+1)>0", "-(x*2)<3", "2*(x-y)==0", "x>0&&(y<1||y>2)", "!(x>0)||y!=0"] {
            let e = parse_condition(src).unwrap();
            assert_eq!(e.to_string(), src);
        }
    }

    #[test]
    fn versioned_names_round_trip() {
        let x = Var::new("x");
        assert_eq!(x.versioned(3).unversioned(), Some((x, 3)));
    }
}
