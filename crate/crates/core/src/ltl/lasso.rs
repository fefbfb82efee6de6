use super::{AlphabetSymbol, LtlError, LtlFormula};

/// The ultimately periodic word `stem · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoWord {
    stem: Vec<AlphabetSymbol>,
    cycle: Vec<AlphabetSymbol>,
}

impl LassoWord {
    pub fn new(stem: Vec<AlphabetSymbol>, cycle: Vec<AlphabetSymbol>) -> Result<Self, LtlError> {
        if cycle.is_empty() {
            return Err(LtlError::EmptyLoop);
        }
        Ok(LassoWord { stem, cycle })
    }

    pub fn stem(&self) -> &[AlphabetSymbol] {
        &self.stem
    }

    pub fn cycle(&self) -> &[AlphabetSymbol] {
        &self.cycle
    }

    /// Number of distinct positions: `|stem| + |loop|`.
    pub fn positions(&self) -> usize {
        self.stem.len() + self.cycle.len()
    }

    /// Letter at position `i` of the infinite word.
    pub fn at(&self, i: usize) -> AlphabetSymbol {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// Drops the first letter.
    pub fn shift(&self) -> LassoWord {
        if self.stem.is_empty() {
            let mut cycle = self.cycle[1..].to_vec();
            cycle.push(self.cycle[0]);
            LassoWord {
                stem: Vec::new(),
                cycle,
            }
        } else {
            LassoWord {
                stem: self.stem[1..].to_vec(),
                cycle: self.cycle.clone(),
            }
        }
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.stem.len()
        }
    }
}

/// Decides `stem·loop^ω ⊨ f` exactly.
///
/// Every subformula is evaluated on the `|stem| + |loop|` distinct
/// positions; `Until`/`Eventually` are least fixed points and
/// `Release`/`Always` greatest fixed points over the successor map.
pub fn satisfies_lasso(w: &LassoWord, f: &LtlFormula) -> bool {
    eval(w, f)[0]
}

fn eval(w: &LassoWord, f: &LtlFormula) -> Vec<bool> {
    use LtlFormula::*;
    let n = w.positions();
    let pointwise = |a: Vec<bool>, b: Vec<bool>, op: fn(bool, bool) -> bool| -> Vec<bool> {
        a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
    };
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Atom(p) => (0..n).map(|i| w.at(i).contains(*p)).collect(),
        Not(a) => eval(w, a).into_iter().map(|x| !x).collect(),
        Or(a, b) => pointwise(eval(w, a), eval(w, b), |x, y| x || y),
        And(a, b) => pointwise(eval(w, a), eval(w, b), |x, y| x && y),
        Implies(a, b) => pointwise(eval(w, a), eval(w, b), |x, y| !x || y),
        Iff(a, b) => pointwise(eval(w, a), eval(w, b), |x, y| x == y),
        Next(a) => {
            let a = eval(w, a);
            (0..n).map(|i| a[w.succ(i)]).collect()
        }
        Until(a, b) => fixpoint(w, &eval(w, a), &eval(w, b), false),
        Eventually(b) => fixpoint(w, &vec![true; n], &eval(w, b), false),
        Release(a, b) => fixpoint(w, &eval(w, a), &eval(w, b), true),
        Always(b) => fixpoint(w, &vec![false; n], &eval(w, b), true),
    }
}

// Until (lfp):   v[i] = b[i] || (a[i] && v[succ i])
// Release (gfp): v[i] = b[i] && (a[i] || v[succ i])
fn fixpoint(w: &LassoWord, a: &[bool], b: &[bool], greatest: bool) -> Vec<bool> {
    let n = w.positions();
    let mut v = vec![greatest; n];
    loop {
        let mut changed = false;
        for i in (0..n).rev() {
            let next = v[w.succ(i)];
            let x = if greatest {
                b[i] && (a[i] || next)
            } else {
                b[i] || (a[i] && next)
            };
            if x != v[i] {
                v[i] = x;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::LtlFormula as L;

    const P: AlphabetSymbol = AlphabetSymbol(1);
    const E: AlphabetSymbol = AlphabetSymbol(0);

    #[test]
    fn atom_at_first_position() {
        let w = LassoWord::new(vec![P], vec![E]).unwrap();
        assert!(satisfies_lasso(&w, &L::Atom(0)));
        assert!(satisfies_lasso(&w, &L::True));
        assert!(!satisfies_lasso(&w, &L::next(L::Atom(0))));
    }

    #[test]
    fn alternating_loop() {
        let w = LassoWord::new(vec![], vec![P, E]).unwrap();
        assert!(satisfies_lasso(&w, &L::always(L::eventually(L::Atom(0)))));
        assert!(!satisfies_lasso(&w, &L::always(L::Atom(0))));
    }

    /// Brute-force unrolling: for ultimately periodic words, a temporal
    /// operator's witness (if any) appears within `positions` steps, so
    /// unrolling to `positions * (depth + 1)` letters is exact.
    fn unrolled(w: &LassoWord, f: &L, at: usize, horizon: usize) -> bool {
        match f {
            L::True => true,
            L::False => false,
            L::Atom(p) => w.at(at).contains(*p),
            L::Not(a) => !unrolled(w, a, at, horizon),
            L::Or(a, b) => unrolled(w, a, at, horizon) || unrolled(w, b, at, horizon),
            L::And(a, b) => unrolled(w, a, at, horizon) && unrolled(w, b, at, horizon),
            L::Next(a) => unrolled(w, a, at + 1, horizon),
            L::Eventually(a) => (at..at + horizon).any(|j| unrolled(w, a, j, horizon)),
            L::Always(a) => (at..at + horizon).all(|j| unrolled(w, a, j, horizon)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn matches_unrolling_oracle() {
        let formulas = [
            L::always(L::eventually(L::Atom(0))),
            L::eventually(L::always(L::Atom(0))),
            L::always(L::Atom(0)),
            L::always(L::or(L::Atom(0), L::next(L::Atom(0)))),
            L::eventually(L::and(L::Atom(0), L::next(L::not(L::Atom(0))))),
        ];
        for stem_len in 0..3usize {
            for cyc_len in 1..4usize {
                for bits in 0..(1u32 << (stem_len + cyc_len)) {
                    let sym = |i: usize| AlphabetSymbol((bits >> i & 1) as u64);
                    let stem = (0..stem_len).map(sym).collect();
                    let cycle = (stem_len..stem_len + cyc_len).map(sym).collect();
                    let w = LassoWord::new(stem, cycle).unwrap();
                    let horizon = w.positions() + 1;
                    for f in &formulas {
                        assert_eq!(satisfies_lasso(&w, f), unrolled(&w, f, 0, horizon), "{w:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn shift_rotates_loop() {
        let w = LassoWord::new(vec![], vec![P, E, E]).unwrap();
        let s = w.shift();
        assert_eq!(s.cycle(), &[E, E, P]);
        for i in 0..10 {
            assert_eq!(s.at(i), w.at(i + 1));
        }
    }

    #[test]
    fn empty_loop_rejected() {
        assert_eq!(LassoWord::new(vec![P], vec![]), Err(LtlError::EmptyLoop));
    }
}
