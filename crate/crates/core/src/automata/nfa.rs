use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::Trace;
use crate::lang::expr::Operation;

pub type StateId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub from: StateId,
    pub op: Operation,
    pub to: StateId,
}

/// A finite automaton over operations.
///
/// Transitions keep their declaration order, which fixes every tie-break
/// (BFS, products, serialization). `origin` remembers, for each state,
/// which state of the automaton it was derived from when products or
/// trimming renumber states; freshly built automata map each state to
/// itself.
#[derive(Clone, Debug)]
pub struct Nfa {
    names: Vec<String>,
    accepting: Vec<bool>,
    initial: StateId,
    transitions: Vec<Transition>,
    alphabet: BTreeSet<Operation>,
    out: Vec<Vec<usize>>,
    origin: Vec<StateId>,
}

impl PartialEq for Nfa {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.accepting == other.accepting
            && self.initial == other.initial
            && self.transitions == other.transitions
            && self.alphabet == other.alphabet
    }
}

impl Eq for Nfa {}

impl Nfa {
    /// An automaton with a single non-accepting initial state.
    pub fn new(initial: &str) -> Self {
        Nfa {
            names: vec![initial.to_string()],
            accepting: vec![false],
            initial: 0,
            transitions: Vec::new(),
            alphabet: BTreeSet::new(),
            out: vec![Vec::new()],
            origin: vec![0],
        }
    }

    /// The trimmed representation of the empty language.
    pub fn empty(alphabet: impl IntoIterator<Item = Operation>) -> Self {
        let mut a = Nfa::new("q0");
        a.extend_alphabet(alphabet);
        a
    }

    /// Accepts exactly `trace`.
    pub fn straight_line(trace: &[Operation]) -> Self {
        let mut a = Nfa::new("q0");
        for (i, op) in trace.iter().enumerate() {
            let q = a.add_state(&format!("q{}", i + 1), false);
            a.add_transition(i, op.clone(), q);
        }
        a.set_accepting(trace.len(), true);
        a
    }

    pub fn add_state(&mut self, name: &str, accepting: bool) -> StateId {
        let id = self.names.len();
        self.names.push(name.to_string());
        self.accepting.push(accepting);
        self.out.push(Vec::new());
        self.origin.push(id);
        id
    }

    pub fn set_initial(&mut self, q: StateId) {
        self.initial = q;
    }

    pub fn set_accepting(&mut self, q: StateId, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add_transition(&mut self, from: StateId, op: Operation, to: StateId) {
        self.alphabet.insert(op.clone());
        self.out[from].push(self.transitions.len());
        self.transitions.push(Transition { from, op, to });
    }

    pub fn extend_alphabet(&mut self, ops: impl IntoIterator<Item = Operation>) {
        self.alphabet.extend(ops);
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn count_states(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn state_by_name(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).filter(|&q| self.accepting[q])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    /// Outgoing transitions of `q` in declaration order.
    pub fn out(&self, q: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.out[q].iter().map(|&i| &self.transitions[i])
    }

    pub fn alphabet(&self) -> &BTreeSet<Operation> {
        &self.alphabet
    }

    /// The state of the originally constructed automaton that `q` descends
    /// from through products and trimming.
    pub fn origin(&self, q: StateId) -> StateId {
        self.origin[q]
    }

    fn successors(&self, states: &BTreeSet<StateId>, op: &Operation) -> BTreeSet<StateId> {
        states
            .iter()
            .flat_map(|&q| self.out(q).filter(|t| t.op == *op).map(|t| t.to))
            .collect()
    }

    pub fn accepts(&self, word: &[Operation]) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for op in word {
            current = self.successors(&current, op);
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|&q| self.accepting[q])
    }

    pub fn is_empty(&self) -> bool {
        self.shortest_from(self.initial).is_none()
    }

    /// A shortest accepted word; among those of minimal length, the one
    /// BFS finds first when exploring edges in declaration order.
    pub fn shortest_accepted(&self) -> Option<Trace> {
        self.shortest_from(self.initial)
    }

    /// A shortest word leading from `q` to an accepting state.
    pub fn shortest_from(&self, q: StateId) -> Option<Trace> {
        if self.accepting[q] {
            return Some(Trace::default());
        }
        let mut parent: Vec<Option<usize>> = vec![None; self.names.len()];
        let mut seen = vec![false; self.names.len()];
        seen[q] = true;
        let mut queue = VecDeque::from([q]);
        while let Some(s) = queue.pop_front() {
            for &ti in &self.out[s] {
                let to = self.transitions[ti].to;
                if seen[to] {
                    continue;
                }
                seen[to] = true;
                parent[to] = Some(ti);
                if self.accepting[to] {
                    let mut ops = Vec::new();
                    let mut cur = to;
                    while let Some(ti) = parent[cur] {
                        ops.push(self.transitions[ti].op.clone());
                        cur = self.transitions[ti].from;
                    }
                    ops.reverse();
                    return Some(Trace::new(ops));
                }
                queue.push_back(to);
            }
        }
        None
    }

    /// `L(self) \ L(other)`, as the product of `self` with the complement
    /// of the subset construction of `other`, built lazily and trimmed.
    /// The result keeps `self`'s alphabet.
    pub fn difference(&self, other: &Nfa) -> Nfa {
        let mut delta: HashMap<(StateId, &Operation), Vec<StateId>> = HashMap::new();
        for t in &other.transitions {
            delta.entry((t.from, &t.op)).or_default().push(t.to);
        }
        let step = |set: &BTreeSet<StateId>, op: &Operation| -> BTreeSet<StateId> {
            set.iter()
                .filter_map(|&q| delta.get(&(q, op)))
                .flatten()
                .copied()
                .collect()
        };
        let rejects = |set: &BTreeSet<StateId>| !set.iter().any(|&q| other.accepting[q]);

        let mut subsets: BTreeMap<BTreeSet<StateId>, usize> = BTreeMap::new();
        let mut ids: HashMap<(StateId, usize), StateId> = HashMap::new();
        let mut pairs: Vec<(StateId, usize)> = Vec::new();
        let mut result = Nfa {
            names: Vec::new(),
            accepting: Vec::new(),
            initial: 0,
            transitions: Vec::new(),
            alphabet: self.alphabet.clone(),
            out: Vec::new(),
            origin: Vec::new(),
        };

        let mut intern = |qa: StateId,
                          set: BTreeSet<StateId>,
                          result: &mut Nfa,
                          pairs: &mut Vec<(StateId, usize)>,
                          subset_list: &mut Vec<BTreeSet<StateId>>|
         -> (StateId, bool) {
            let next = subsets.len();
            let si = *subsets.entry(set.clone()).or_insert_with(|| {
                subset_list.push(set.clone());
                next
            });
            if let Some(&id) = ids.get(&(qa, si)) {
                return (id, false);
            }
            let id = result.add_state(
                &format!("{}.{}", self.names[qa], si),
                self.accepting[qa] && rejects(&set),
            );
            result.origin[id] = self.origin[qa];
            ids.insert((qa, si), id);
            pairs.push((qa, si));
            (id, true)
        };

        let mut subset_list: Vec<BTreeSet<StateId>> = Vec::new();
        let (start, _) = intern(
            self.initial,
            BTreeSet::from([other.initial]),
            &mut result,
            &mut pairs,
            &mut subset_list,
        );
        result.initial = start;
        let mut queue = VecDeque::from([start]);
        while let Some(p) = queue.pop_front() {
            let (qa, si) = pairs[p];
            for t in self.out(qa) {
                let next = step(&subset_list[si], &t.op);
                let (q, fresh) = intern(t.to, next, &mut result, &mut pairs, &mut subset_list);
                result.add_transition(p, t.op.clone(), q);
                if fresh {
                    queue.push_back(q);
                }
            }
        }
        result.trim()
    }

    /// Removes states that are unreachable or cannot reach acceptance.
    /// Surviving states and transitions keep their relative order.
    pub fn trim(&self) -> Nfa {
        let n = self.names.len();
        let mut reach = vec![false; n];
        reach[self.initial] = true;
        let mut stack = vec![self.initial];
        while let Some(q) = stack.pop() {
            for t in self.out(q) {
                if !reach[t.to] {
                    reach[t.to] = true;
                    stack.push(t.to);
                }
            }
        }
        let mut incoming: Vec<Vec<StateId>> = vec![Vec::new(); n];
        for t in &self.transitions {
            incoming[t.to].push(t.from);
        }
        let mut coreach: Vec<bool> = self.accepting.clone();
        let mut stack: Vec<StateId> = self.accepting_states().collect();
        while let Some(q) = stack.pop() {
            for &p in &incoming[q] {
                if !coreach[p] {
                    coreach[p] = true;
                    stack.push(p);
                }
            }
        }
        if !coreach[self.initial] {
            let mut e = Nfa::new(&self.names[self.initial]);
            e.origin[0] = self.origin[self.initial];
            e.alphabet = self.alphabet.clone();
            return e;
        }
        let keep: Vec<bool> = (0..n).map(|q| reach[q] && coreach[q]).collect();
        let mut map = vec![usize::MAX; n];
        let mut out = Nfa {
            names: Vec::new(),
            accepting: Vec::new(),
            initial: 0,
            transitions: Vec::new(),
            alphabet: self.alphabet.clone(),
            out: Vec::new(),
            origin: Vec::new(),
        };
        for q in (0..n).filter(|&q| keep[q]) {
            map[q] = out.add_state(&self.names[q], self.accepting[q]);
            out.origin[map[q]] = self.origin[q];
        }
        out.initial = map[self.initial];
        for t in &self.transitions {
            if keep[t.from] && keep[t.to] {
                out.add_transition(map[t.from], t.op.clone(), map[t.to]);
            }
        }
        out
    }

    /// Renames states to `q0, q1, …` in id order.
    pub fn renumbered(&self) -> Nfa {
        let mut out = self.clone();
        for (i, n) in out.names.iter_mut().enumerate() {
            *n = format!("q{i}");
        }
        out
    }

    /// Every accepted word of length at most `max_len`, shortest first and
    /// in declaration order within a length.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Trace> {
        let mut words = Vec::new();
        let mut layer: Vec<(Vec<Operation>, BTreeSet<StateId>)> =
            vec![(Vec::new(), BTreeSet::from([self.initial]))];
        for len in 0..=max_len {
            for (w, set) in &layer {
                if set.iter().any(|&q| self.accepting[q]) {
                    words.push(Trace::new(w.clone()));
                }
            }
            if len == max_len {
                break;
            }
            let mut next = Vec::new();
            for (w, set) in &layer {
                for op in &self.alphabet {
                    let s = self.successors(set, op);
                    if !s.is_empty() {
                        let mut w2 = w.clone();
                        w2.push(op.clone());
                        next.push((w2, s));
                    }
                }
            }
            layer = next;
        }
        words
    }
}
