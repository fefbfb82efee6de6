//! Recursive-descent parser for the ASCII LTL grammar.
//!
//! Precedence, loosest first: `<->`, `->` (right), `|`, `&`, `U`/`R`
//! (right), then the prefix operators `! X F G`. `{p,q}` is shorthand for
//! `p & q`; `{}` is `true`.

use super::{Alphabet, LtlError, LtlFormula};

/// Parses `text` against a fixed alphabet; unknown names are errors.
pub fn parse_ltl(text: &str, alphabet: &Alphabet) -> Result<LtlFormula, LtlError> {
    let mut names = Names::Fixed(alphabet);
    parse_with(text, &mut names)
}

/// Parses `text`, appending unseen proposition names to `alphabet`.
pub fn parse_ltl_extending(text: &str, alphabet: &mut Alphabet) -> Result<LtlFormula, LtlError> {
    let mut names = Names::Growing(alphabet);
    parse_with(text, &mut names)
}

fn parse_with(text: &str, names: &mut Names<'_>) -> Result<LtlFormula, LtlError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        names,
        end: text.len(),
    };
    let f = p.iff()?;
    match p.peek() {
        None => Ok(f),
        Some((at, t)) => Err(LtlError::Syntax {
            position: at,
            message: format!("unexpected {}", t.describe()),
        }),
    }
}

enum Names<'a> {
    Fixed(&'a Alphabet),
    Growing(&'a mut Alphabet),
}

impl Names<'_> {
    fn resolve(&mut self, name: &str, position: usize) -> Result<usize, LtlError> {
        match self {
            Names::Fixed(a) => a.id(name).ok_or_else(|| LtlError::UnknownProposition {
                name: name.to_string(),
                position,
            }),
            Names::Growing(a) => a.insert(name),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Until,
    Release,
    Eventually,
    Always,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            other => format!("token {other:?}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, LtlError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'!' => Tok::Not,
            b'&' => Tok::And,
            b'|' => Tok::Or,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'{' => Tok::LBrace,
            b'}' => Tok::RBrace,
            b',' => Tok::Comma,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Tok::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i + 1 < bytes.len()
                    && (bytes[i + 1].is_ascii_alphanumeric() || bytes[i + 1] == b'_')
                {
                    i += 1;
                }
                match &text[start..=i] {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "X" => Tok::Next,
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "F" => Tok::Eventually,
                    "G" => Tok::Always,
                    ident => Tok::Ident(ident.to_string()),
                }
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(LtlError::Syntax {
                    position: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'n, 'a> {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    names: &'n mut Names<'a>,
    end: usize,
}

impl Parser<'_, '_> {
    fn peek(&self) -> Option<(usize, &Tok)> {
        self.tokens.get(self.pos).map(|(at, t)| (*at, t))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek().map(|(_, x)| x) == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok) -> Result<(), LtlError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(&format!("expected {t:?}")))
        }
    }

    fn error(&self, what: &str) -> LtlError {
        match self.peek() {
            Some((at, t)) => LtlError::Syntax {
                position: at,
                message: format!("{what}, found {}", t.describe()),
            },
            None => LtlError::Syntax {
                position: self.end,
                message: format!("{what}, found end of input"),
            },
        }
    }

    fn iff(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            let rhs = self.implies()?;
            lhs = LtlFormula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implies()?;
            return Ok(LtlFormula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            let rhs = self.and()?;
            lhs = LtlFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<LtlFormula, LtlError> {
        let mut lhs = self.temporal()?;
        while self.eat(&Tok::And) {
            let rhs = self.temporal()?;
            lhs = LtlFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<LtlFormula, LtlError> {
        let lhs = self.unary()?;
        if self.eat(&Tok::Until) {
            let rhs = self.temporal()?;
            return Ok(LtlFormula::until(lhs, rhs));
        }
        if self.eat(&Tok::Release) {
            let rhs = self.temporal()?;
            return Ok(LtlFormula::release(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<LtlFormula, LtlError> {
        let Some((at, tok)) = self.peek() else {
            return Err(self.error("expected formula"));
        };
        let tok = tok.clone();
        match tok {
            Tok::Not => {
                self.pos += 1;
                Ok(LtlFormula::not(self.unary()?))
            }
            Tok::Next => {
                self.pos += 1;
                Ok(LtlFormula::next(self.unary()?))
            }
            Tok::Eventually => {
                self.pos += 1;
                Ok(LtlFormula::eventually(self.unary()?))
            }
            Tok::Always => {
                self.pos += 1;
                Ok(LtlFormula::always(self.unary()?))
            }
            Tok::True => {
                self.pos += 1;
                Ok(LtlFormula::True)
            }
            Tok::False => {
                self.pos += 1;
                Ok(LtlFormula::False)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                Ok(LtlFormula::Atom(self.names.resolve(&name, at)?))
            }
            Tok::LParen => {
                self.pos += 1;
                let f = self.iff()?;
                self.expect(&Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrace => {
                self.pos += 1;
                self.subset()
            }
            _ => Err(self.error("expected formula")),
        }
    }

    // `{p, q, ...}` after the opening brace: conjunction of members.
    fn subset(&mut self) -> Result<LtlFormula, LtlError> {
        let mut out: Option<LtlFormula> = None;
        if self.eat(&Tok::RBrace) {
            return Ok(LtlFormula::True);
        }
        loop {
            match self.peek() {
                Some((at, Tok::Ident(name))) => {
                    let name = name.clone();
                    self.pos += 1;
                    let atom = LtlFormula::Atom(self.names.resolve(&name, at)?);
                    out = Some(match out {
                        None => atom,
                        Some(prev) => LtlFormula::and(prev, atom),
                    });
                }
                _ => return Err(self.error("expected proposition name")),
            }
            if self.eat(&Tok::RBrace) {
                return Ok(out.expect("at least one member"));
            }
            self.expect(&Tok::Comma)?;
        }
    }
}
