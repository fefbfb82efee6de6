//! Linear temporal logic over a finite proposition alphabet: parsing,
//! rewriting, and exact satisfaction on ultimately periodic words.

mod formula;
mod lasso;
mod parser;

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use formula::{FormulaDisplay, LtlFormula};
pub use lasso::{satisfies_lasso, LassoWord};
pub use parser::{parse_ltl, parse_ltl_extending};

/// Alphabets are bitmask-backed, so at most this many propositions.
pub const MAX_PROPOSITIONS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown proposition `{name}` at byte {position}")]
    UnknownProposition { name: String, position: usize },
    #[error("duplicate proposition `{0}`")]
    DuplicateProposition(String),
    #[error("alphabet is limited to {MAX_PROPOSITIONS} propositions")]
    AlphabetFull,
    #[error("lasso loop must be nonempty")]
    EmptyLoop,
}

/// A named atomic proposition with its dense id in the owning alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Proposition {
    pub name: String,
    pub id: usize,
}

/// An ordered set of uniquely named propositions with contiguous ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    names: Vec<String>,
    ids: HashMap<String, usize>,
}

impl From<Vec<String>> for Alphabet {
    fn from(names: Vec<String>) -> Self {
        let mut a = Alphabet::default();
        for n in names {
            // serde path: duplicates collapse to the first occurrence
            let _ = a.insert(&n);
        }
        a
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.names
    }
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self, LtlError> {
        let mut a = Alphabet::default();
        for n in names {
            if a.ids.contains_key(n.as_ref()) {
                return Err(LtlError::DuplicateProposition(n.as_ref().to_string()));
            }
            a.insert(n.as_ref())?;
        }
        Ok(a)
    }

    /// Returns the id of `name`, adding it if absent.
    pub fn insert(&mut self, name: &str) -> Result<usize, LtlError> {
        if let Some(&id) = self.ids.get(name) {
            return Ok(id);
        }
        if self.names.len() == MAX_PROPOSITIONS {
            return Err(LtlError::AlphabetFull);
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: usize) -> Option<&str> {
        self.names.get(id).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn propositions(&self) -> impl Iterator<Item = Proposition> + '_ {
        self.names.iter().enumerate().map(|(id, name)| Proposition {
            name: name.clone(),
            id,
        })
    }

    /// Mask with one bit per proposition.
    pub fn full_mask(&self) -> u64 {
        if self.names.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.names.len()) - 1
        }
    }

    /// The symbol in which exactly the named propositions hold.
    pub fn symbol<S: AsRef<str>>(&self, names: &[S]) -> Result<AlphabetSymbol, LtlError> {
        let mut bits = 0u64;
        for n in names {
            let id = self
                .id(n.as_ref())
                .ok_or_else(|| LtlError::UnknownProposition {
                    name: n.as_ref().to_string(),
                    position: 0,
                })?;
            bits |= 1 << id;
        }
        Ok(AlphabetSymbol(bits))
    }

    /// All `2^|Π|` symbols in increasing bit order.
    pub fn all_symbols(&self) -> impl Iterator<Item = AlphabetSymbol> {
        (0..=self.full_mask()).map(AlphabetSymbol)
    }

    pub fn symbol_names(&self, s: AlphabetSymbol) -> Vec<&str> {
        s.ids().filter_map(|i| self.name(i)).collect()
    }
}

/// One letter of `2^Π`: the set of propositions true at a step.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct AlphabetSymbol(pub u64);

impl AlphabetSymbol {
    pub const EMPTY: AlphabetSymbol = AlphabetSymbol(0);

    pub fn contains(self, id: usize) -> bool {
        id < 64 && self.0 >> id & 1 == 1
    }

    pub fn with(self, id: usize) -> Self {
        AlphabetSymbol(self.0 | 1 << id)
    }

    pub fn ids(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

impl fmt::Display for AlphabetSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.ids().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}
