//! Trace selection: breadth-first first, then the diverse search that
//! steers away from traces already handed out.

use std::collections::BTreeSet;
use std::time::Instant;

use crate::automata::nfa::{Nfa, StateId};
use crate::automata::Trace;

/// The search ran out of its wall-time budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BudgetExceeded;

/// Looks for an accepted trace extending `prefix` from state `q` that is
/// not in `relevant`, preferring transitions that fewer relevant traces
/// take.
///
/// Every member of `relevant` is expected to extend `prefix`. With nothing
/// relevant left, the shortest continuation is returned. Otherwise the
/// outgoing transitions are tried in ascending order of how many relevant
/// traces continue through them (ties keep declaration order); an
/// extension equal to a relevant trace is skipped, an extension reaching
/// an accepting state is returned at once, and anything else recurses on
/// the relevant traces that still agree.
pub fn diverse_search(
    a: &Nfa,
    q: StateId,
    prefix: &Trace,
    relevant: &[&Trace],
    deadline: Option<Instant>,
) -> Result<Option<Trace>, BudgetExceeded> {
    if deadline.is_some_and(|d| Instant::now() >= d) {
        return Err(BudgetExceeded);
    }
    if relevant.is_empty() {
        return Ok(a.shortest_from(q).map(|rest| prefix.concat(&rest)));
    }
    let depth = prefix.len();
    let mut outgoing: Vec<_> = a
        .out(q)
        .map(|t| {
            let count = relevant
                .iter()
                .filter(|r| r.len() > depth && r[depth] == t.op)
                .count();
            (count, t)
        })
        .collect();
    outgoing.sort_by_key(|(count, _)| *count);

    for (_, t) in outgoing {
        let ext = prefix.extended(&t.op);
        if relevant.iter().any(|r| **r == ext) {
            continue;
        }
        if a.is_accepting(t.to) {
            return Ok(Some(ext));
        }
        let sub: Vec<&Trace> = relevant
            .iter()
            .copied()
            .filter(|r| ext.is_prefix_of(r))
            .collect();
        if let Some(found) = diverse_search(a, t.to, &ext, &sub, deadline)? {
            return Ok(Some(found));
        }
    }
    Ok(None)
}

/// Picks the next trace to hand out, avoiding `exclude`. The first pick of
/// a distribution phase tries plain breadth-first search.
pub fn select_next(
    a: &Nfa,
    exclude: &BTreeSet<Trace>,
    first_in_phase: bool,
    deadline: Option<Instant>,
) -> Result<Option<Trace>, BudgetExceeded> {
    if first_in_phase {
        match a.shortest_accepted() {
            None => return Ok(None),
            Some(t) if !exclude.contains(&t) => return Ok(Some(t)),
            Some(_) => {}
        }
    }
    let relevant: Vec<&Trace> = exclude.iter().collect();
    diverse_search(a, a.initial(), &Trace::default(), &relevant, deadline)
}
