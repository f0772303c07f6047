//! External solvers speaking SMT-LIB2 over standard input and output.
//!
//! Each query gets its own process. The script is written up to
//! `(check-sat)`; only if the answer is `sat` is `(get-value …)` sent.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::process::{Child, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Signed;

use super::builtin::{witness_from_model, BuiltinBackend};
use super::{Backend, BackendError, FeasibilityResult};
use crate::automata::Trace;
use crate::lang::expr::Var;
use crate::logic::solver::Model;
use crate::logic::ssa::SsaFormula;
use crate::logic::{encode_trace, Predicate, SatResult, SolverConfig};

/// Checks feasibility with an external solver; interpolants for
/// infeasible traces still come from the builtin strongest-postcondition
/// path.
pub struct SmtLibBackend {
    argv: Vec<String>,
    timeout: Duration,
    builtin: BuiltinBackend,
}

impl SmtLibBackend {
    pub fn new(command: &str, timeout: Duration, solver: SolverConfig) -> Self {
        SmtLibBackend {
            argv: command.split_whitespace().map(String::from).collect(),
            timeout,
            builtin: BuiltinBackend::new(solver),
        }
    }
}

impl Backend for SmtLibBackend {
    fn check_trace(&self, trace: &Trace) -> Result<FeasibilityResult, BackendError> {
        let formula = encode_trace(trace);
        Ok(match smtlib_check(&formula, &self.argv, self.timeout)? {
            SatResult::Sat(model) => witness_from_model(trace, &formula, &model),
            SatResult::Unsat => self.builtin.unsat_result(trace),
            SatResult::Unknown => FeasibilityResult::Unknown("external solver: unknown".into()),
        })
    }
}

fn symbol(v: &Var) -> String {
    format!("|{v}|")
}

fn numeral(n: &BigInt) -> String {
    if n.is_negative() {
        format!("(- {})", -n)
    } else {
        n.to_string()
    }
}

fn term(p: &Predicate) -> String {
    if p.is_true() {
        return "true".into();
    }
    if p.is_false() {
        return "false".into();
    }
    let cube_terms: Vec<String> = p
        .cubes()
        .iter()
        .map(|c| {
            let atoms: Vec<String> = c
                .atoms()
                .map(|(t, b)| {
                    let summands: Vec<String> = t
                        .0
                        .iter()
                        .map(|(v, k)| format!("(* {} {})", numeral(k), symbol(v)))
                        .collect();
                    let lhs = if summands.len() == 1 {
                        summands[0].clone()
                    } else {
                        format!("(+ {})", summands.join(" "))
                    };
                    format!("(<= {lhs} {})", numeral(b))
                })
                .collect();
            if atoms.len() == 1 {
                atoms[0].clone()
            } else {
                format!("(and {})", atoms.join(" "))
            }
        })
        .collect();
    if cube_terms.len() == 1 {
        cube_terms[0].clone()
    } else {
        format!("(or {})", cube_terms.join(" "))
    }
}

fn formula_vars(f: &SsaFormula) -> BTreeSet<Var> {
    f.conjuncts.iter().flat_map(Predicate::vars).chain(f.havocs.iter().map(|(_, v)| v.clone())).collect()
}

/// The script sent up to and including `(check-sat)`.
pub fn smtlib_script(f: &SsaFormula) -> String {
    let mut s = String::from("(set-option :produce-models true)\n(set-logic QF_LIA)\n");
    for v in formula_vars(f) {
        let _ = writeln!(s, "(declare-const {} Int)", symbol(&v));
    }
    for c in &f.conjuncts {
        if !c.is_true() {
            let _ = writeln!(s, "(assert {})", term(c));
        }
    }
    s.push_str("(check-sat)\n");
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

/// Parses one s-expression from the front of `s`; returns it with the
/// number of bytes consumed, or `None` if `s` holds no complete one yet.
fn parse_sexp(s: &str) -> Option<(Sexp, usize)> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let mut stack: Vec<Vec<Sexp>> = Vec::new();
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i >= bytes.len() {
            return None;
        }
        let item = match bytes[i] {
            b'(' => {
                stack.push(Vec::new());
                i += 1;
                continue;
            }
            b')' => {
                i += 1;
                Sexp::List(stack.pop()?)
            }
            b'|' => {
                let end = s[i + 1..].find('|')? + i + 1;
                let atom = s[i + 1..end].to_string();
                i = end + 1;
                Sexp::Atom(atom)
            }
            b'"' => {
                let end = s[i + 1..].find('"')? + i + 1;
                let atom = s[i + 1..end].to_string();
                i = end + 1;
                Sexp::Atom(atom)
            }
            _ => {
                let start = i;
                while i < bytes.len() && !bytes[i].is_ascii_whitespace() && !b"()|".contains(&bytes[i]) {
                    i += 1;
                }
                if i >= bytes.len() && stack.is_empty() {
                    // An atom at the very end may still be growing.
                    return None;
                }
                Sexp::Atom(s[start..i].to_string())
            }
        };
        match stack.last_mut() {
            Some(top) => top.push(item),
            None => return Some((item, i)),
        }
    }
}

fn sexp_int(e: &Sexp) -> Option<BigInt> {
    match e {
        Sexp::Atom(a) => a.parse().ok(),
        Sexp::List(items) => match items.as_slice() {
            [Sexp::Atom(m), x] if m == "-" => sexp_int(x).map(|v| -v),
            _ => None,
        },
    }
}

struct Session {
    child: Child,
    lines: Receiver<String>,
    buffer: String,
    deadline: Instant,
}

enum Read {
    Got(Sexp),
    Timeout,
}

impl Session {
    fn next(&mut self) -> Result<Read, BackendError> {
        loop {
            if let Some((e, used)) = parse_sexp(&self.buffer) {
                self.buffer.drain(..used);
                return Ok(Read::Got(e));
            }
            let left = self.deadline.saturating_duration_since(Instant::now());
            match self.lines.recv_timeout(left) {
                Ok(line) => {
                    self.buffer.push_str(&line);
                    self.buffer.push('\n');
                }
                Err(RecvTimeoutError::Timeout) => return Ok(Read::Timeout),
                Err(RecvTimeoutError::Disconnected) => {
                    // Flush a trailing atom without newline, if any.
                    self.buffer.push(' ');
                    if let Some((e, used)) = parse_sexp(&self.buffer) {
                        self.buffer.drain(..used);
                        return Ok(Read::Got(e));
                    }
                    return Err(BackendError::Protocol("solver closed its output".into()));
                }
            }
        }
    }

    fn send(&mut self, text: &str) -> Result<(), BackendError> {
        let stdin = self
            .child
            .stdin
            .as_mut()
            .ok_or_else(|| BackendError::Protocol("stdin closed".into()))?;
        stdin.write_all(text.as_bytes())?;
        stdin.flush()?;
        Ok(())
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        drop(self.child.stdin.take());
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Runs one satisfiability query in a fresh solver process. A timeout
/// yields `Unknown`; failures to launch or to understand the solver are
/// errors.
pub fn smtlib_check(
    f: &SsaFormula,
    argv: &[String],
    timeout: Duration,
) -> Result<SatResult, BackendError> {
    let command = argv.join(" ");
    let (program, args) = argv.split_first().ok_or_else(|| BackendError::Launch {
        command: command.clone(),
        source: std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command"),
    })?;
    let mut child = Command::new(program)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| BackendError::Launch { command, source })?;
    let stdout = child.stdout.take().expect("piped stdout");
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(stdout).lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    let mut session = Session {
        child,
        lines: rx,
        buffer: String::new(),
        deadline: Instant::now() + timeout,
    };

    session.send(&smtlib_script(f))?;
    let answer = match session.next()? {
        Read::Timeout => return Ok(SatResult::Unknown),
        Read::Got(Sexp::Atom(a)) => a,
        Read::Got(other) => {
            return Err(BackendError::Protocol(format!("unexpected answer {other:?}")))
        }
    };
    match answer.as_str() {
        "unsat" => Ok(SatResult::Unsat),
        "unknown" => Ok(SatResult::Unknown),
        "sat" => {
            let vars: Vec<Var> = formula_vars(f).into_iter().collect();
            if vars.is_empty() {
                return Ok(SatResult::Sat(Model::new()));
            }
            let names: Vec<String> = vars.iter().map(symbol).collect();
            session.send(&format!("(get-value ({}))\n", names.join(" ")))?;
            let values = match session.next()? {
                Read::Timeout => return Ok(SatResult::Unknown),
                Read::Got(Sexp::List(items)) => items,
                Read::Got(other) => {
                    return Err(BackendError::Protocol(format!("unexpected values {other:?}")))
                }
            };
            let _ = session.send("(exit)\n");
            let mut model = Model::new();
            for item in values {
                match item {
                    Sexp::List(pair) if pair.len() == 2 => {
                        let (Sexp::Atom(name), Some(v)) = (&pair[0], sexp_int(&pair[1])) else {
                            return Err(BackendError::Protocol(format!("bad value {pair:?}")));
                        };
                        model.insert(Var::new(name), v);
                    }
                    other => return Err(BackendError::Protocol(format!("bad value {other:?}"))),
                }
            }
            Ok(SatResult::Sat(model))
        }
        other => Err(BackendError::Protocol(format!("unexpected answer `{other}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sexp_parsing() {
        let (e, used) = parse_sexp("((|x@0| (- 3)) (|y@1| 7)) tail").unwrap();
        assert_eq!(used, 25);
        let Sexp::List(items) = e else { panic!() };
        assert_eq!(items.len(), 2);
        let Sexp::List(p) = &items[0] else { panic!() };
        assert_eq!(p[0], Sexp::Atom("x@0".into()));
        assert_eq!(sexp_int(&p[1]), Some(BigInt::from(-3)));
        assert_eq!(parse_sexp("(sat"), None);
        assert_eq!(parse_sexp("unsat"), None);
        assert_eq!(parse_sexp("unsat\n").unwrap().0, Sexp::Atom("unsat".into()));
    }

    #[test]
    fn script_shape() {
        let t: Trace = "x>0, x=-x;, !(x!=0)".parse().unwrap();
        let s = smtlib_script(&encode_trace(&t));
        assert_eq!(
            s,
            "(set-option :produce-models true)\n(set-logic QF_LIA)\n\
(declare-const |x@0| Int)\n(declare-const |x@1| Int)\n\
(assert (<= (* (- 1) |x@0|) (- 1)))\n\
(assert (and (<= (+ (* (- 1) |x@0|) (* (- 1) |x@1|)) 0) (<= (+ (* 1 |x@0|) (* 1 |x@1|)) 0)))\n\
(assert (and (<= (* (- 1) |x@1|) 0) (<= (* 1 |x@1|) 0)))\n\
(check-sat)\n"
        );
    }

    #[test]
    fn missing_solver_is_a_launch_error() {
        let f = encode_trace(&[]);
        let err = smtlib_check(
            &f,
            &["/nonexistent/solver".to_string()],
            Duration::from_secs(1),
        )
        .unwrap_err();
        assert!(matches!(err, BackendError::Launch { .. }));
    }
}
