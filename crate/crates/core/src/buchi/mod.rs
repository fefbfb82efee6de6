//! Büchi automata for LTL formulae and the bad-prefix monitors derived
//! from them.

mod io;
mod monitor;
mod tableau;

use thiserror::Error;

use crate::ltl::{Alphabet, AlphabetSymbol};

pub use io::AutomatonDocument;
pub use monitor::{accepting_reach_set, run_monitor, MonitorNfa, MonitorRun, Verdict};
pub use tableau::{ltl_to_buchi, ltl_to_buchi_with_limit, DEFAULT_STATE_LIMIT};

#[derive(Debug, Error)]
pub enum BuchiError {
    #[error("automaton exceeds the state limit of {0}")]
    StateLimit(usize),
    #[error("formula references proposition id {id} outside an alphabet of {len}")]
    AtomOutOfAlphabet { id: usize, len: usize },
    #[error("malformed automaton: {0}")]
    Malformed(String),
    #[error("unknown proposition `{0}` in automaton document")]
    UnknownProposition(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Conjunction of literals: every `pos` bit true and every `neg` bit false.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard {
    pub pos: u64,
    pub neg: u64,
}

impl Guard {
    pub const TRUE: Guard = Guard { pos: 0, neg: 0 };

    pub fn matches(self, s: AlphabetSymbol) -> bool {
        s.0 & self.pos == self.pos && s.0 & self.neg == 0
    }

    pub fn is_satisfiable(self) -> bool {
        self.pos & self.neg == 0
    }

    /// Every letter over `alphabet` satisfying the guard.
    pub fn expand(self, alphabet: &Alphabet) -> Vec<AlphabetSymbol> {
        alphabet
            .all_symbols()
            .filter(|&s| self.matches(s))
            .collect()
    }

    pub fn render(self, alphabet: &Alphabet) -> String {
        let mut lits = Vec::new();
        for i in 0..64 {
            let name = || {
                alphabet
                    .name(i)
                    .map(str::to_string)
                    .unwrap_or_else(|| format!("#{i}"))
            };
            if self.pos >> i & 1 == 1 {
                lits.push(name());
            }
            if self.neg >> i & 1 == 1 {
                lits.push(format!("!{}", name()));
            }
        }
        if lits.is_empty() {
            "true".to_string()
        } else {
            lits.join(" & ")
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
}

/// `(Q, δ, q₀, F)` with states numbered `0..num_states`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BuchiAutomaton {
    alphabet: Alphabet,
    accepting: Vec<bool>,
    initial: usize,
    transitions: Vec<Transition>,
    // transitions[offsets[q]..offsets[q+1]] leave q
    offsets: Vec<usize>,
}

impl BuchiAutomaton {
    /// Validates and normalizes: sorts δ, drops duplicates and
    /// unsatisfiable guards.
    pub fn new(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        accepting: &[usize],
        mut transitions: Vec<Transition>,
    ) -> Result<Self, BuchiError> {
        if initial >= num_states {
            return Err(BuchiError::Malformed(format!(
                "initial state {initial} not among {num_states} states"
            )));
        }
        let mut acc = vec![false; num_states];
        for &q in accepting {
            *acc.get_mut(q).ok_or_else(|| {
                BuchiError::Malformed(format!("accepting state {q} out of range"))
            })? = true;
        }
        let mask = alphabet.full_mask();
        for t in &transitions {
            if t.from >= num_states || t.to >= num_states {
                return Err(BuchiError::Malformed(format!(
                    "transition {} -> {} out of range",
                    t.from, t.to
                )));
            }
            if (t.guard.pos | t.guard.neg) & !mask != 0 {
                return Err(BuchiError::Malformed(
                    "guard mentions propositions outside the alphabet".into(),
                ));
            }
        }
        transitions.retain(|t| t.guard.is_satisfiable());
        transitions.sort();
        transitions.dedup();
        let mut offsets = vec![0; num_states + 1];
        for t in &transitions {
            offsets[t.from + 1] += 1;
        }
        for q in 0..num_states {
            offsets[q + 1] += offsets[q];
        }
        Ok(BuchiAutomaton {
            alphabet,
            accepting: acc,
            initial,
            transitions,
            offsets,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.accepting.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_states()).filter(|&q| self.accepting[q])
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn outgoing(&self, q: usize) -> &[Transition] {
        &self.transitions[self.offsets[q]..self.offsets[q + 1]]
    }

    /// Successor states of `q` on letter `s`, ascending and deduplicated.
    pub fn successors(&self, q: usize, s: AlphabetSymbol) -> impl Iterator<Item = usize> + '_ {
        let mut last = usize::MAX;
        let mut v: Vec<usize> = self
            .outgoing(q)
            .iter()
            .filter(|t| t.guard.matches(s))
            .map(|t| t.to)
            .collect();
        v.sort_unstable();
        v.into_iter().filter(move |&x| {
            let keep = x != last;
            last = x;
            keep
        })
    }

    /// Same automaton with states renamed by `perm[old] = new`.
    pub fn renumbered(&self, perm: &[usize]) -> Result<Self, BuchiError> {
        if perm.len() != self.num_states() {
            return Err(BuchiError::Malformed("permutation length mismatch".into()));
        }
        let accepting: Vec<usize> = self.accepting_states().map(|q| perm[q]).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                from: perm[t.from],
                guard: t.guard,
                to: perm[t.to],
            })
            .collect();
        BuchiAutomaton::new(
            self.alphabet.clone(),
            self.num_states(),
            perm[self.initial],
            &accepting,
            transitions,
        )
    }

    /// Whether the automaton accepts `stem · cycle^ω`.
    ///
    /// Works on the product of automaton states with lasso positions: the
    /// word is accepted iff some reachable accepting product state lies on
    /// a product cycle.
    pub fn accepts_lasso(&self, w: &crate::ltl::LassoWord) -> bool {
        let n = w.positions();
        let stem = w.stem().len();
        let succ = |i: usize| if i + 1 < n { i + 1 } else { stem };
        let id = |q: usize, i: usize| q * n + i;
        let total = self.num_states() * n;
        let next = |v: usize| -> Vec<usize> {
            let (q, i) = (v / n, v % n);
            self.successors(q, w.at(i))
                .map(|q2| id(q2, succ(i)))
                .collect()
        };
        let mut reach = vec![false; total];
        let mut stack = vec![id(self.initial, 0)];
        reach[stack[0]] = true;
        while let Some(v) = stack.pop() {
            for u in next(v) {
                if !reach[u] {
                    reach[u] = true;
                    stack.push(u);
                }
            }
        }
        (0..total)
            .filter(|&v| reach[v] && self.accepting[v / n])
            .any(|start| {
                let mut seen = vec![false; total];
                let mut stack = next(start);
                while let Some(v) = stack.pop() {
                    if v == start {
                        return true;
                    }
                    if !seen[v] {
                        seen[v] = true;
                        stack.extend(next(v));
                    }
                }
                false
            })
    }

    /// Human-readable listing, one transition per line.
    pub fn dump(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "states {} initial {}", self.num_states(), self.initial);
        let acc: Vec<String> = self.accepting_states().map(|q| q.to_string()).collect();
        let _ = writeln!(out, "accepting {}", acc.join(" "));
        for t in &self.transitions {
            let _ = writeln!(
                out,
                "{} -> {} [{}]",
                t.from,
                t.to,
                t.guard.render(&self.alphabet)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_matching() {
        let g = Guard {
            pos: 0b01,
            neg: 0b10,
        };
        assert!(g.matches(AlphabetSymbol(0b01)));
        assert!(!g.matches(AlphabetSymbol(0b11)));
        assert!(!g.matches(AlphabetSymbol(0b00)));
        assert!(Guard::TRUE.matches(AlphabetSymbol(0b11)));
        let a = Alphabet::new(&["p", "q"]).unwrap();
        assert_eq!(g.expand(&a), vec![AlphabetSymbol(1)]);
        assert_eq!(g.render(&a), "p & !q");
    }

    #[test]
    fn constructor_validates() {
        let a = Alphabet::new(&["p"]).unwrap();
        assert!(BuchiAutomaton::new(a.clone(), 1, 1, &[], vec![]).is_err());
        let bad = Transition {
            from: 0,
            guard: Guard::TRUE,
            to: 3,
        };
        assert!(BuchiAutomaton::new(a.clone(), 1, 0, &[], vec![bad]).is_err());
        let outside = Transition {
            from: 0,
            guard: Guard { pos: 0b10, neg: 0 },
            to: 0,
        };
        assert!(BuchiAutomaton::new(a.clone(), 1, 0, &[], vec![outside]).is_err());
        let contradictory = Transition {
            from: 0,
            guard: Guard { pos: 1, neg: 1 },
            to: 0,
        };
        let ok = BuchiAutomaton::new(a, 1, 0, &[0], vec![contradictory]).unwrap();
        assert!(ok.transitions().is_empty());
    }
}
