//! Line-oriented text format for automata.
//!
//! ```text
//! # comment
//! loc l0
//! loc l1
//! init l0
//! error l1
//! edge l0 l1 assume x > 0
//! edge l1 l1 assign x x - 1
//! edge l1 l1 havoc y
//! letter assume y == 2
//! annot l1 x<=0
//! ```
//!
//! `letter` lines record alphabet operations that label no edge, so that
//! trimmed abstractions round-trip. `annot` lines are informational and are
//! returned separately by [`load_annotated`].

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::nfa::{Nfa, StateId};
use crate::lang::expr::{Expr, OpKind, Operation};
use crate::lang::parser::{parse_arith, parse_condition, ParseError, ParseErrorKind};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: location `{from}` has two `{op}` edges")]
    Nondeterministic { line: usize, from: String, op: String },
    #[error("line {line}: undeclared location `{id}`")]
    Dangling { line: usize, id: String },
    #[error("line {line}: error location `{id}` has an outgoing edge")]
    ErrorHasSuccessor { line: usize, id: String },
}

/// Parses an operation from its canonical text: `x=e;`, `havoc x;`, or a
/// condition.
pub fn parse_operation(text: &str) -> Result<Operation, ParseError> {
    let text = text.trim();
    if let Some(body) = text.strip_suffix(';') {
        if let Some(target) = body.trim().strip_prefix("havoc ") {
            return Ok(Operation::havoc(&target_var(target)?));
        }
        let (lhs, rhs) = body.split_once('=').ok_or_else(|| ParseError {
            line: 1,
            col: 1,
            kind: ParseErrorKind::Syntax("expected an assignment".into()),
        })?;
        return Ok(Operation::assign(&target_var(lhs)?, parse_arith(rhs)?));
    }
    Ok(Operation::assume(parse_condition(text)?))
}

fn target_var(text: &str) -> Result<String, ParseError> {
    match parse_arith(text)? {
        Expr::Var(v) => Ok(v.name().to_string()),
        _ => Err(ParseError {
            line: 1,
            col: 1,
            kind: ParseErrorKind::Syntax(format!("`{}` is not a variable", text.trim())),
        }),
    }
}

fn op_fields(op: &Operation) -> String {
    match op.kind() {
        OpKind::Assume(c) => format!("assume {c}"),
        OpKind::Assign(x, e) => format!("assign {x} {e}"),
        OpKind::Havoc(x) => format!("havoc {x}"),
    }
}

/// Serializes an automaton. Accepting states are written as `error`.
pub fn serialize(a: &Nfa) -> String {
    serialize_annotated(a, &BTreeMap::new())
}

pub fn serialize_annotated(a: &Nfa, annotations: &BTreeMap<StateId, String>) -> String {
    let mut s = String::new();
    for q in 0..a.count_states() {
        let _ = writeln!(s, "loc {}", a.name(q));
    }
    let _ = writeln!(s, "init {}", a.name(a.initial()));
    for q in a.accepting_states() {
        let _ = writeln!(s, "error {}", a.name(q));
    }
    let mut used = HashSet::new();
    for t in a.transitions() {
        used.insert(t.op.text());
        let _ = writeln!(s, "edge {} {} {}", a.name(t.from), a.name(t.to), op_fields(&t.op));
    }
    for op in a.alphabet() {
        if !used.contains(op.text()) {
            let _ = writeln!(s, "letter {}", op_fields(op));
        }
    }
    for (q, text) in annotations {
        let _ = writeln!(s, "annot {} {}", a.name(*q), text);
    }
    s
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_op_fields(line: usize, kind: &str, rest: &str) -> Result<Operation, FormatError> {
    let err = |e: ParseError| syntax(line, format!("{kind}: {}", e.kind));
    match kind {
        "assume" => Ok(Operation::assume(parse_condition(rest).map_err(err)?)),
        "assign" => {
            let (x, e) = rest
                .trim()
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(line, "assign needs a variable and an expression"))?;
            let x = target_var(x).map_err(err)?;
            Ok(Operation::assign(&x, parse_arith(e).map_err(err)?))
        }
        "havoc" => Ok(Operation::havoc(&target_var(rest).map_err(err)?)),
        other => Err(syntax(line, format!("unknown operation kind `{other}`"))),
    }
}

/// Loads any automaton without the program-automaton checks.
pub fn load_nfa(text: &str) -> Result<Nfa, FormatError> {
    load_annotated(text, false).map(|(a, _)| a)
}

/// Loads a program automaton: additionally rejects two equal-labelled
/// edges out of one location and edges leaving an error location.
pub fn load_automaton(text: &str) -> Result<Nfa, FormatError> {
    load_annotated(text, true).map(|(a, _)| a)
}

/// Loads an automaton together with its `annot` lines.
pub fn load_annotated(
    text: &str,
    program: bool,
) -> Result<(Nfa, BTreeMap<StateId, String>), FormatError> {
    let mut names: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, StateId> = BTreeMap::new();
    let mut initial: Option<StateId> = None;
    let mut errors: Vec<StateId> = Vec::new();
    let mut edges: Vec<(usize, StateId, Operation, StateId)> = Vec::new();
    let mut letters = Vec::new();
    let mut annots = BTreeMap::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut parts = content.splitn(2, char::is_whitespace);
        let keyword = parts.next().unwrap_or("");
        let rest = parts.next().unwrap_or("").trim();
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| FormatError::Dangling {
                line,
                id: id.to_string(),
            })
        };
        match keyword {
            "loc" => {
                if rest.is_empty() || rest.contains(char::is_whitespace) {
                    return Err(syntax(line, "loc takes one identifier"));
                }
                if index.contains_key(rest) {
                    return Err(syntax(line, format!("location `{rest}` declared twice")));
                }
                index.insert(rest.to_string(), names.len());
                names.push(rest.to_string());
            }
            "init" => {
                if initial.is_some() {
                    return Err(syntax(line, "second init line"));
                }
                initial = Some(lookup(rest)?);
            }
            "error" => errors.push(lookup(rest)?),
            "edge" => {
                let fields: Vec<&str> = rest.splitn(4, char::is_whitespace).collect();
                if fields.len() < 4 {
                    return Err(syntax(line, "edge needs source, target, kind and operation"));
                }
                let from = lookup(fields[0])?;
                let to = lookup(fields[1])?;
                let op = parse_op_fields(line, fields[2], fields[3])?;
                edges.push((line, from, op, to));
            }
            "letter" => {
                let (kind, op) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(line, "letter needs a kind and an operation"))?;
                letters.push(parse_op_fields(line, kind, op)?);
            }
            "annot" => {
                let (id, pred) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| syntax(line, "annot needs a location and a predicate"))?;
                annots.insert(lookup(id)?, pred.trim().to_string());
            }
            other => return Err(syntax(line, format!("unknown keyword `{other}`"))),
        }
    }

    let initial = initial.ok_or_else(|| syntax(text.lines().count(), "missing init line"))?;
    let mut a = Nfa::new(&names[0]);
    for n in &names[1..] {
        a.add_state(n, false);
    }
    a.set_initial(initial);
    for &e in &errors {
        a.set_accepting(e, true);
    }
    let mut seen = HashSet::new();
    for (line, from, op, to) in edges {
        if program {
            if a.is_accepting(from) {
                return Err(FormatError::ErrorHasSuccessor {
                    line,
                    id: names[from].clone(),
                });
            }
            if !seen.insert((from, op.text().to_string())) {
                return Err(FormatError::Nondeterministic {
                    line,
                    from: names[from].clone(),
                    op: op.text().to_string(),
                });
            }
        }
        a.add_transition(from, op, to);
    }
    a.extend_alphabet(letters);
    Ok((a, annots))
}
