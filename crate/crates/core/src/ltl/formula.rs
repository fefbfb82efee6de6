use std::fmt;

use super::Alphabet;

/// LTL abstract syntax. Atoms refer to proposition ids of one alphabet.
///
/// Equality is structural except that `Eventually(f)` and
/// `Until(True, f)` compare equal: the printer renders both as `F f`.
#[derive(Debug, Clone)]
pub enum LtlFormula {
    True,
    False,
    Atom(usize),
    Not(Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Iff(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Release(Box<LtlFormula>, Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Always(Box<LtlFormula>),
}

use LtlFormula::*;

impl PartialEq for LtlFormula {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (True, True) | (False, False) => true,
            (Atom(a), Atom(b)) => a == b,
            (Not(a), Not(b)) | (Next(a), Next(b)) | (Always(a), Always(b)) => a == b,
            (Eventually(a), Eventually(b)) => a == b,
            (Eventually(a), Until(t, b)) | (Until(t, b), Eventually(a)) => **t == True && a == b,
            (Or(a1, b1), Or(a2, b2))
            | (And(a1, b1), And(a2, b2))
            | (Implies(a1, b1), Implies(a2, b2))
            | (Iff(a1, b1), Iff(a2, b2))
            | (Until(a1, b1), Until(a2, b2))
            | (Release(a1, b1), Release(a2, b2)) => a1 == a2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for LtlFormula {}

impl LtlFormula {
    pub fn atom(id: usize) -> Self {
        Atom(id)
    }
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Not(Box::new(f))
    }
    pub fn or(a: Self, b: Self) -> Self {
        Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: Self, b: Self) -> Self {
        And(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        Implies(Box::new(a), Box::new(b))
    }
    pub fn iff(a: Self, b: Self) -> Self {
        Iff(Box::new(a), Box::new(b))
    }
    pub fn next(f: Self) -> Self {
        Next(Box::new(f))
    }
    pub fn until(a: Self, b: Self) -> Self {
        Until(Box::new(a), Box::new(b))
    }
    pub fn release(a: Self, b: Self) -> Self {
        Release(Box::new(a), Box::new(b))
    }
    pub fn eventually(f: Self) -> Self {
        Eventually(Box::new(f))
    }
    pub fn always(f: Self) -> Self {
        Always(Box::new(f))
    }

    pub fn depth(&self) -> usize {
        match self {
            True | False | Atom(_) => 0,
            Not(a) | Next(a) | Eventually(a) | Always(a) => 1 + a.depth(),
            Or(a, b) | And(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Largest proposition id referenced, if any.
    pub fn max_atom(&self) -> Option<usize> {
        match self {
            True | False => None,
            Atom(p) => Some(*p),
            Not(a) | Next(a) | Eventually(a) | Always(a) => a.max_atom(),
            Or(a, b) | And(a, b) | Implies(a, b) | Iff(a, b) | Until(a, b) | Release(a, b) => {
                a.max_atom().max(b.max_atom())
            }
        }
    }

    /// Rewrites into the core operators `Atom, True, Not, Or, Next, Until`.
    pub fn desugar(&self) -> LtlFormula {
        let d = |f: &LtlFormula| f.desugar();
        match self {
            True => True,
            False => Self::not(True),
            Atom(p) => Atom(*p),
            Not(a) => Self::not(d(a)),
            Or(a, b) => Self::or(d(a), d(b)),
            And(a, b) => Self::not(Self::or(Self::not(d(a)), Self::not(d(b)))),
            Implies(a, b) => Self::or(Self::not(d(a)), d(b)),
            Iff(a, b) => {
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                Self::and(Self::implies(a.clone(), b.clone()), Self::implies(b, a)).desugar()
            }
            Next(a) => Self::next(d(a)),
            Until(a, b) => Self::until(d(a), d(b)),
            Release(a, b) => Self::not(Self::until(Self::not(d(a)), Self::not(d(b)))),
            Eventually(a) => Self::until(True, d(a)),
            Always(a) => Self::not(Self::until(True, Self::not(d(a)))),
        }
    }

    /// Pushes negations onto atoms. The result uses only `True, False,
    /// Atom, Not(Atom), And, Or, Next, Until, Release`.
    pub fn negation_normal_form(&self) -> LtlFormula {
        self.nnf(false)
    }

    fn nnf(&self, neg: bool) -> LtlFormula {
        match (self, neg) {
            (True, false) | (False, true) => True,
            (True, true) | (False, false) => False,
            (Atom(p), false) => Atom(*p),
            (Atom(p), true) => Self::not(Atom(*p)),
            (Not(a), _) => a.nnf(!neg),
            (Or(a, b), false) | (And(a, b), true) => Self::or(a.nnf(neg), b.nnf(neg)),
            (And(a, b), false) | (Or(a, b), true) => Self::and(a.nnf(neg), b.nnf(neg)),
            (Implies(a, b), false) => Self::or(a.nnf(true), b.nnf(false)),
            (Implies(a, b), true) => Self::and(a.nnf(false), b.nnf(true)),
            (Iff(a, b), false) => Self::and(
                Self::or(a.nnf(true), b.nnf(false)),
                Self::or(b.nnf(true), a.nnf(false)),
            ),
            (Iff(a, b), true) => Self::or(
                Self::and(a.nnf(false), b.nnf(true)),
                Self::and(b.nnf(false), a.nnf(true)),
            ),
            (Next(a), _) => Self::next(a.nnf(neg)),
            (Until(a, b), false) | (Release(a, b), true) => Self::until(a.nnf(neg), b.nnf(neg)),
            (Release(a, b), false) | (Until(a, b), true) => Self::release(a.nnf(neg), b.nnf(neg)),
            (Eventually(a), false) => Self::until(True, a.nnf(false)),
            (Eventually(a), true) => Self::release(False, a.nnf(true)),
            (Always(a), false) => Self::release(False, a.nnf(false)),
            (Always(a), true) => Self::until(True, a.nnf(true)),
        }
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            True | False | Atom(_) => true,
            Not(a) => matches!(**a, Atom(_)),
            And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => a.is_nnf() && b.is_nnf(),
            Next(a) => a.is_nnf(),
            Implies(..) | Iff(..) | Eventually(_) | Always(_) => false,
        }
    }

    /// Printable form using proposition names from `alphabet`.
    pub fn display<'a>(&'a self, alphabet: &'a Alphabet) -> FormulaDisplay<'a> {
        FormulaDisplay {
            formula: self,
            alphabet,
        }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a LtlFormula,
    alphabet: &'a Alphabet,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(f, self.formula, self.alphabet, 0)
    }
}

const PREC_IFF: u8 = 1;
const PREC_IMPLIES: u8 = 2;
const PREC_OR: u8 = 3;
const PREC_AND: u8 = 4;
const PREC_TEMPORAL: u8 = 5;
const PREC_UNARY: u8 = 6;

fn prec(f: &LtlFormula) -> u8 {
    match f {
        Iff(..) => PREC_IFF,
        Implies(..) => PREC_IMPLIES,
        Or(..) => PREC_OR,
        And(..) => PREC_AND,
        Until(t, _) if **t == True => PREC_UNARY,
        Until(..) | Release(..) => PREC_TEMPORAL,
        _ => PREC_UNARY,
    }
}

fn write_prec(
    f: &mut fmt::Formatter<'_>,
    node: &LtlFormula,
    alphabet: &Alphabet,
    ctx: u8,
) -> fmt::Result {
    let p = prec(node);
    if p < ctx {
        write!(f, "(")?;
    }
    let bin = |f: &mut fmt::Formatter<'_>, a, op: &str, b, la, lb| {
        write_prec(f, a, alphabet, la)?;
        write!(f, " {op} ")?;
        write_prec(f, b, alphabet, lb)
    };
    match node {
        True => write!(f, "true")?,
        False => write!(f, "false")?,
        Atom(id) => match alphabet.name(*id) {
            Some(n) => write!(f, "{n}")?,
            None => write!(f, "#{id}")?,
        },
        Not(a) => {
            write!(f, "!")?;
            write_prec(f, a, alphabet, PREC_UNARY)?;
        }
        Next(a) => {
            write!(f, "X ")?;
            write_prec(f, a, alphabet, PREC_UNARY)?;
        }
        Eventually(a) => {
            write!(f, "F ")?;
            write_prec(f, a, alphabet, PREC_UNARY)?;
        }
        Until(t, a) if **t == True => {
            write!(f, "F ")?;
            write_prec(f, a, alphabet, PREC_UNARY)?;
        }
        Always(a) => {
            write!(f, "G ")?;
            write_prec(f, a, alphabet, PREC_UNARY)?;
        }
        // left-associative
        Iff(a, b) => bin(f, a, "<->", b, p, p + 1)?,
        Or(a, b) => bin(f, a, "|", b, p, p + 1)?,
        And(a, b) => bin(f, a, "&", b, p, p + 1)?,
        // right-associative
        Implies(a, b) => bin(f, a, "->", b, p + 1, p)?,
        Until(a, b) => bin(f, a, "U", b, p + 1, p)?,
        Release(a, b) => bin(f, a, "R", b, p + 1, p)?,
    }
    if p < ctx {
        write!(f, ")")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> LtlFormula {
        Atom(0)
    }
    fn q() -> LtlFormula {
        Atom(1)
    }

    #[test]
    fn desugar_and() {
        let f = LtlFormula::and(p(), q()).desugar();
        assert_eq!(
            f,
            LtlFormula::not(LtlFormula::or(LtlFormula::not(p()), LtlFormula::not(q())))
        );
    }

    #[test]
    fn desugar_always() {
        let f = LtlFormula::always(p()).desugar();
        assert_eq!(
            f,
            LtlFormula::not(LtlFormula::until(True, LtlFormula::not(p())))
        );
    }

    #[test]
    fn desugar_atom_fixed_point() {
        assert_eq!(p().desugar(), p());
    }

    #[test]
    fn nnf_examples() {
        let u = LtlFormula::not(LtlFormula::until(p(), LtlFormula::not(q())));
        assert_eq!(
            u.negation_normal_form(),
            LtlFormula::release(LtlFormula::not(p()), q())
        );
        assert_eq!(
            LtlFormula::not(LtlFormula::not(p())).negation_normal_form(),
            p()
        );
        assert_eq!(
            LtlFormula::not(LtlFormula::next(p())).negation_normal_form(),
            LtlFormula::next(LtlFormula::not(p()))
        );
    }

    #[test]
    fn eventually_equals_true_until() {
        assert_eq!(LtlFormula::eventually(p()), LtlFormula::until(True, p()));
        assert_ne!(LtlFormula::eventually(p()), LtlFormula::until(q(), p()));
    }

    #[test]
    fn printing_uses_minimal_parentheses() {
        let a = Alphabet::new(&["p", "q"]).unwrap();
        let f = LtlFormula::always(LtlFormula::implies(
            p(),
            LtlFormula::next(LtlFormula::not(p())),
        ));
        assert_eq!(f.display(&a).to_string(), "G (p -> X !p)");
        let g = LtlFormula::and(p(), LtlFormula::and(q(), p()));
        assert_eq!(g.display(&a).to_string(), "p & (q & p)");
        let h = LtlFormula::until(LtlFormula::until(p(), q()), p());
        assert_eq!(h.display(&a).to_string(), "(p U q) U p");
        assert_eq!(LtlFormula::until(True, p()).display(&a).to_string(), "F p");
    }
}
