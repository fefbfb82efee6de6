//! On-the-fly tableau translation of NNF formulae into generalized Büchi
//! automata, followed by counter degeneralization and a bisimulation
//! quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use super::{BuchiAutomaton, BuchiError, Guard, Transition};
use crate::ltl::{Alphabet, LtlFormula};

pub const DEFAULT_STATE_LIMIT: usize = 10_000;

pub fn ltl_to_buchi(f: &LtlFormula, alphabet: &Alphabet) -> Result<BuchiAutomaton, BuchiError> {
    ltl_to_buchi_with_limit(f, alphabet, DEFAULT_STATE_LIMIT)
}

pub fn ltl_to_buchi_with_limit(
    f: &LtlFormula,
    alphabet: &Alphabet,
    limit: usize,
) -> Result<BuchiAutomaton, BuchiError> {
    if let Some(id) = f.max_atom() {
        if id >= alphabet.len() {
            return Err(BuchiError::AtomOutOfAlphabet {
                id,
                len: alphabet.len(),
            });
        }
    }
    let mut arena = Arena::default();
    let root = arena.intern_nnf(&f.negation_normal_form());
    let graph = expand(&arena, root, limit)?;
    let (num_states, accepting, transitions) = degeneralize(&arena, &graph, limit)?;
    let (num_states, initial, accepting, transitions) =
        quotient(num_states, 0, &accepting, &transitions);
    BuchiAutomaton::new(
        alphabet.clone(),
        num_states,
        initial,
        &accepting,
        transitions,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Lit(usize, bool),
    And(usize, usize),
    Or(usize, usize),
    Next(usize),
    Until(usize, usize),
    Release(usize, usize),
}

#[derive(Default)]
struct Arena {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
}

impl Arena {
    fn add(&mut self, n: Node) -> usize {
        if let Some(&i) = self.index.get(&n) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(n.clone());
        self.index.insert(n, i);
        i
    }

    fn intern_nnf(&mut self, f: &LtlFormula) -> usize {
        use LtlFormula as L;
        let n = match f {
            L::True => Node::True,
            L::False => Node::False,
            L::Atom(p) => Node::Lit(*p, true),
            L::Not(a) => match **a {
                L::Atom(p) => Node::Lit(p, false),
                _ => unreachable!("input is in negation normal form"),
            },
            L::And(a, b) => Node::And(self.intern_nnf(a), self.intern_nnf(b)),
            L::Or(a, b) => Node::Or(self.intern_nnf(a), self.intern_nnf(b)),
            L::Next(a) => Node::Next(self.intern_nnf(a)),
            L::Until(a, b) => Node::Until(self.intern_nnf(a), self.intern_nnf(b)),
            L::Release(a, b) => Node::Release(self.intern_nnf(a), self.intern_nnf(b)),
            _ => unreachable!("input is in negation normal form"),
        };
        self.add(n)
    }
}

type Set = BTreeSet<usize>;

const INIT: usize = usize::MAX;

struct Pending {
    incoming: Set,
    new: Set,
    old: Set,
    next: Set,
}

struct TableauNode {
    incoming: Set,
    old: Set,
}

/// Tableau nodes after expansion; each node's `old` set describes the
/// letter it reads and the obligations at its position.
fn expand(arena: &Arena, root: usize, limit: usize) -> Result<Vec<TableauNode>, BuchiError> {
    let mut done: Vec<TableauNode> = Vec::new();
    let mut index: HashMap<(Set, Set), usize> = HashMap::new();
    let mut stack = vec![Pending {
        incoming: Set::from([INIT]),
        new: Set::from([root]),
        old: Set::new(),
        next: Set::new(),
    }];
    while let Some(mut n) = stack.pop() {
        let Some(eta) = n.new.pop_first() else {
            let key = (n.old, n.next);
            if let Some(&id) = index.get(&key) {
                done[id].incoming.extend(n.incoming);
            } else {
                if done.len() >= limit {
                    return Err(BuchiError::StateLimit(limit));
                }
                let id = done.len();
                let (old, next) = key.clone();
                done.push(TableauNode {
                    incoming: n.incoming,
                    old,
                });
                index.insert(key, id);
                stack.push(Pending {
                    incoming: Set::from([id]),
                    new: next,
                    old: Set::new(),
                    next: Set::new(),
                });
            }
            continue;
        };
        if n.old.contains(&eta) {
            stack.push(n);
            continue;
        }
        let add_new = |n: &mut Pending, f: usize| {
            if !n.old.contains(&f) {
                n.new.insert(f);
            }
        };
        match arena.nodes[eta] {
            Node::False => {}
            Node::True => {
                n.old.insert(eta);
                stack.push(n);
            }
            Node::Lit(p, polarity) => {
                let contradicts = arena
                    .index
                    .get(&Node::Lit(p, !polarity))
                    .is_some_and(|neg| n.old.contains(neg));
                if !contradicts {
                    n.old.insert(eta);
                    stack.push(n);
                }
            }
            Node::And(a, b) => {
                add_new(&mut n, a);
                add_new(&mut n, b);
                n.old.insert(eta);
                stack.push(n);
            }
            Node::Next(a) => {
                n.next.insert(a);
                n.old.insert(eta);
                stack.push(n);
            }
            Node::Or(a, b) | Node::Until(a, b) | Node::Release(a, b) => {
                let mut left = Pending {
                    incoming: n.incoming.clone(),
                    new: n.new.clone(),
                    old: n.old.clone(),
                    next: n.next.clone(),
                };
                let mut right = n;
                match arena.nodes[eta] {
                    Node::Or(..) => {
                        add_new(&mut left, a);
                        add_new(&mut right, b);
                    }
                    // a U b  ≡  b ∨ (a ∧ X(a U b))
                    Node::Until(..) => {
                        add_new(&mut left, a);
                        left.next.insert(eta);
                        add_new(&mut right, b);
                    }
                    // a R b  ≡  (a ∧ b) ∨ (b ∧ X(a R b))
                    _ => {
                        add_new(&mut left, b);
                        left.next.insert(eta);
                        add_new(&mut right, a);
                        add_new(&mut right, b);
                    }
                }
                left.old.insert(eta);
                right.old.insert(eta);
                stack.push(right);
                stack.push(left);
            }
        }
    }
    Ok(done)
}

fn guard_of(arena: &Arena, old: &Set) -> Guard {
    let mut g = Guard::TRUE;
    for &f in old {
        if let Node::Lit(p, polarity) = arena.nodes[f] {
            if polarity {
                g.pos |= 1 << p;
            } else {
                g.neg |= 1 << p;
            }
        }
    }
    g
}

/// Counter construction: state `(s, c)` moves the counter on when `s`
/// lies in acceptance set `c`; `(s, m-1)` with `s ∈ F_{m-1}` is accepting.
/// Automaton state 0 is the pre-initial state; tableau node `i` is `i + 1`.
fn degeneralize(
    arena: &Arena,
    nodes: &[TableauNode],
    limit: usize,
) -> Result<(usize, Vec<usize>, Vec<Transition>), BuchiError> {
    let untils: Vec<(usize, usize)> = arena
        .nodes
        .iter()
        .enumerate()
        .filter_map(|(i, n)| match n {
            Node::Until(_, b) => Some((i, *b)),
            _ => None,
        })
        .collect();
    let in_set = |node: usize, c: usize| -> bool {
        if node == 0 {
            return false;
        }
        let old = &nodes[node - 1].old;
        let (u, b) = untils[c];
        !old.contains(&u) || old.contains(&b)
    };

    // successor lists over the plain graph, with guards of the target node
    let mut succ: Vec<Vec<(Guard, usize)>> = vec![Vec::new(); nodes.len() + 1];
    for (j, n) in nodes.iter().enumerate() {
        let g = guard_of(arena, &n.old);
        for &i in &n.incoming {
            let from = if i == INIT { 0 } else { i + 1 };
            succ[from].push((g, j + 1));
        }
    }
    for s in &mut succ {
        s.sort();
    }

    let m = untils.len();
    if m == 0 {
        let transitions = succ
            .iter()
            .enumerate()
            .flat_map(|(from, out)| {
                out.iter()
                    .map(move |&(guard, to)| Transition { from, guard, to })
            })
            .collect();
        let all: Vec<usize> = (0..succ.len()).collect();
        return Ok((succ.len(), all, transitions));
    }

    let mut ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut order = vec![(0usize, 0usize)];
    ids.insert((0, 0), 0);
    let mut queue = VecDeque::from([(0usize, 0usize)]);
    let mut transitions = Vec::new();
    while let Some((s, c)) = queue.pop_front() {
        let from = ids[&(s, c)];
        let c2 = if in_set(s, c) { (c + 1) % m } else { c };
        for &(guard, t) in &succ[s] {
            let to = match ids.get(&(t, c2)) {
                Some(&id) => id,
                None => {
                    if order.len() >= limit {
                        return Err(BuchiError::StateLimit(limit));
                    }
                    let id = order.len();
                    ids.insert((t, c2), id);
                    order.push((t, c2));
                    queue.push_back((t, c2));
                    id
                }
            };
            transitions.push(Transition { from, guard, to });
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, &(s, c))| c == m - 1 && in_set(s, c))
        .map(|(i, _)| i)
        .collect();
    Ok((order.len(), accepting, transitions))
}

/// Merges states that agree on acceptance and on their guarded moves into
/// equivalent classes (coarsest stable partition), then renumbers classes
/// breadth-first from the initial state. Unreachable classes are dropped.
fn quotient(
    num_states: usize,
    initial: usize,
    accepting: &[usize],
    transitions: &[Transition],
) -> (usize, usize, Vec<usize>, Vec<Transition>) {
    let mut acc = vec![false; num_states];
    for &q in accepting {
        acc[q] = true;
    }
    let mut out: Vec<Vec<(Guard, usize)>> = vec![Vec::new(); num_states];
    for t in transitions {
        out[t.from].push((t.guard, t.to));
    }
    let mut block: Vec<usize> = acc.iter().map(|&a| a as usize).collect();
    let mut blocks = if acc.iter().all(|&a| a) || acc.iter().all(|&a| !a) {
        1
    } else {
        2
    };
    loop {
        let mut sigs: BTreeMap<(usize, Vec<(Guard, usize)>), usize> = BTreeMap::new();
        let mut next = vec![0; num_states];
        for q in 0..num_states {
            let mut sig: Vec<(Guard, usize)> = out[q].iter().map(|&(g, t)| (g, block[t])).collect();
            sig.sort();
            sig.dedup();
            let key = (block[q], sig);
            let len = sigs.len();
            next[q] = *sigs.entry(key).or_insert(len);
        }
        let count = sigs.len();
        block = next;
        if count == blocks {
            break;
        }
        blocks = count;
    }

    // breadth-first renumbering from the initial class
    let mut rep = vec![usize::MAX; blocks];
    for q in (0..num_states).rev() {
        rep[block[q]] = q;
    }
    let mut new_id = vec![usize::MAX; blocks];
    new_id[block[initial]] = 0;
    let mut order = vec![block[initial]];
    let mut head = 0;
    while head < order.len() {
        let b = order[head];
        head += 1;
        let mut moves: Vec<(Guard, usize)> =
            out[rep[b]].iter().map(|&(g, t)| (g, block[t])).collect();
        moves.sort();
        for (_, tb) in moves {
            if new_id[tb] == usize::MAX {
                new_id[tb] = order.len();
                order.push(tb);
            }
        }
    }
    let mut result = Vec::new();
    for (i, &b) in order.iter().enumerate() {
        for &(guard, t) in &out[rep[b]] {
            result.push(Transition {
                from: i,
                guard,
                to: new_id[block[t]],
            });
        }
    }
    let accepting = order
        .iter()
        .enumerate()
        .filter(|(_, &b)| acc[rep[b]])
        .map(|(i, _)| i)
        .collect();
    (order.len(), 0, accepting, result)
}
