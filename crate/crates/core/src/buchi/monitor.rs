use std::collections::BTreeSet;

use super::BuchiAutomaton;
use crate::ltl::AlphabetSymbol;

/// States that can reach a cycle through an accepting state.
///
/// A strongly connected component qualifies when it holds an accepting
/// state and at least one internal transition (self-loops included).
pub fn accepting_reach_set(a: &BuchiAutomaton) -> BTreeSet<usize> {
    let n = a.num_states();
    let comp = tarjan(a);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut has_accepting = vec![false; ncomp];
    let mut has_edge = vec![false; ncomp];
    for q in 0..n {
        if a.is_accepting(q) {
            has_accepting[comp[q]] = true;
        }
    }
    for t in a.transitions() {
        if comp[t.from] == comp[t.to] {
            has_edge[comp[t.from]] = true;
        }
    }
    let mut live = vec![false; n];
    let mut stack: Vec<usize> = (0..n)
        .filter(|&q| has_accepting[comp[q]] && has_edge[comp[q]])
        .collect();
    for &q in &stack {
        live[q] = true;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in a.transitions() {
        preds[t.to].push(t.from);
    }
    while let Some(q) = stack.pop() {
        for &p in &preds[q] {
            if !live[p] {
                live[p] = true;
                stack.push(p);
            }
        }
    }
    (0..n).filter(|&q| live[q]).collect()
}

// Iterative Tarjan; returns a component id per state.
fn tarjan(a: &BuchiAutomaton) -> Vec<usize> {
    let n = a.num_states();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(frame) = call.last_mut() {
            let v = frame.0;
            let out = a.outgoing(v);
            if frame.1 < out.len() {
                let w = out[frame.1].to;
                frame.1 += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Outcome of monitoring a finite trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// The trace up to and including this step has no satisfying extension.
    BadPrefix(usize),
    Undetermined,
}

/// The automaton read as an NFA whose final states are `F̂`.
#[derive(Debug, Clone)]
pub struct MonitorNfa {
    automaton: BuchiAutomaton,
    live: Vec<bool>,
}

impl MonitorNfa {
    pub fn new(automaton: BuchiAutomaton) -> Self {
        let mut live = vec![false; automaton.num_states()];
        for q in accepting_reach_set(&automaton) {
            live[q] = true;
        }
        MonitorNfa { automaton, live }
    }

    pub fn automaton(&self) -> &BuchiAutomaton {
        &self.automaton
    }

    pub fn is_live(&self, q: usize) -> bool {
        self.live[q]
    }

    pub fn live_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.live.len()).filter(|&q| self.live[q])
    }

    pub fn initial(&self) -> usize {
        self.automaton.initial()
    }

    pub fn num_states(&self) -> usize {
        self.live.len()
    }

    /// Live successors of `q` on `s`, ascending.
    pub fn step(&self, q: usize, s: AlphabetSymbol) -> impl Iterator<Item = usize> + '_ {
        self.automaton.successors(q, s).filter(|&q2| self.live[q2])
    }

    pub fn start(&self) -> MonitorRun<'_> {
        let q0 = self.initial();
        let current = if self.live[q0] {
            BTreeSet::from([q0])
        } else {
            BTreeSet::new()
        };
        MonitorRun {
            monitor: self,
            current,
            steps: 0,
            verdict: Verdict::Undetermined,
        }
    }
}

/// Incremental monitor execution over one trace.
#[derive(Debug, Clone)]
pub struct MonitorRun<'m> {
    monitor: &'m MonitorNfa,
    current: BTreeSet<usize>,
    steps: usize,
    verdict: Verdict,
}

impl MonitorRun<'_> {
    /// Consumes one letter. Once a bad prefix is seen the verdict sticks.
    pub fn push(&mut self, s: AlphabetSymbol) -> Verdict {
        if self.verdict == Verdict::Undetermined {
            let next: BTreeSet<usize> = self
                .current
                .iter()
                .flat_map(|&q| self.monitor.step(q, s))
                .collect();
            if next.is_empty() {
                self.verdict = Verdict::BadPrefix(self.steps);
            }
            self.current = next;
        }
        self.steps += 1;
        self.verdict
    }

    pub fn states(&self) -> &BTreeSet<usize> {
        &self.current
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }
}

pub fn run_monitor(m: &MonitorNfa, trace: &[AlphabetSymbol]) -> Verdict {
    let mut run = m.start();
    for &s in trace {
        if let v @ Verdict::BadPrefix(_) = run.push(s) {
            return v;
        }
    }
    Verdict::Undetermined
}
