//! JSON interchange for automata.

use serde::{Deserialize, Serialize};

use super::{BuchiAutomaton, BuchiError, Guard, Transition};
use crate::ltl::Alphabet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutomatonDocument {
    pub alphabet: Vec<String>,
    pub states: usize,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<TransitionDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionDocument {
    pub from: usize,
    pub to: usize,
    #[serde(default)]
    pub pos: Vec<String>,
    #[serde(default)]
    pub neg: Vec<String>,
}

fn names(mask: u64, alphabet: &Alphabet) -> Vec<String> {
    (0..64)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| alphabet.name(i).unwrap_or_default().to_string())
        .collect()
}

impl BuchiAutomaton {
    pub fn to_document(&self) -> AutomatonDocument {
        let a = self.alphabet();
        AutomatonDocument {
            alphabet: a.names().to_vec(),
            states: self.num_states(),
            initial: self.initial(),
            accepting: self.accepting_states().collect(),
            transitions: self
                .transitions()
                .iter()
                .map(|t| TransitionDocument {
                    from: t.from,
                    to: t.to,
                    pos: names(t.guard.pos, a),
                    neg: names(t.guard.neg, a),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: &AutomatonDocument) -> Result<Self, BuchiError> {
        let alphabet =
            Alphabet::new(&doc.alphabet).map_err(|e| BuchiError::Malformed(e.to_string()))?;
        let mask = |lits: &[String]| -> Result<u64, BuchiError> {
            lits.iter().try_fold(0u64, |m, n| {
                alphabet
                    .id(n)
                    .map(|i| m | 1 << i)
                    .ok_or_else(|| BuchiError::UnknownProposition(n.clone()))
            })
        };
        let mut transitions = Vec::with_capacity(doc.transitions.len());
        for t in &doc.transitions {
            let guard = Guard {
                pos: mask(&t.pos)?,
                neg: mask(&t.neg)?,
            };
            transitions.push(Transition {
                from: t.from,
                guard,
                to: t.to,
            });
        }
        BuchiAutomaton::new(
            alphabet,
            doc.states,
            doc.initial,
            &doc.accepting,
            transitions,
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, BuchiError> {
        let doc: AutomatonDocument = serde_json::from_str(text)?;
        Self::from_document(&doc)
    }
}
