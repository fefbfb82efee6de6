use serde::{Deserialize, Serialize};

use super::{mismatch, LabelError, LabelMatrix};
use crate::abstraction::TransitionSystem;
use crate::ltl::{Alphabet, AlphabetSymbol};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabeledEdge<T> {
    pub from: usize,
    pub to: usize,
    pub cost: T,
    pub label: AlphabetSymbol,
}

/// A weighted graph whose edges carry sets of propositions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSystem<T> {
    alphabet: Alphabet,
    vertex_count: usize,
    edges: Vec<LabeledEdge<T>>,
}

impl<T: Real> LabeledSystem<T> {
    pub fn new(
        alphabet: Alphabet,
        vertex_count: usize,
        edges: Vec<LabeledEdge<T>>,
    ) -> Result<Self, LabelError> {
        for (i, e) in edges.iter().enumerate() {
            if e.from >= vertex_count || e.to >= vertex_count {
                return Err(LabelError::Format(format!(
                    "edge {i} references a missing vertex"
                )));
            }
            if e.label.0 & !alphabet.full_mask() != 0 {
                return Err(LabelError::Format(format!(
                    "edge {i} label lies outside the alphabet"
                )));
            }
        }
        Ok(LabeledSystem {
            alphabet,
            vertex_count,
            edges,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[LabeledEdge<T>] {
        &self.edges
    }
}

/// Attaches row `i` of `labels` to edge `i` of `system`.
pub fn apply_labels<T: Real>(
    system: &TransitionSystem<T>,
    labels: &LabelMatrix,
    alphabet: &Alphabet,
) -> Result<LabeledSystem<T>, LabelError> {
    if labels.rows() != system.edge_count() {
        return Err(mismatch(
            format!("{} label rows", labels.rows()),
            format!("{} edges", system.edge_count()),
        ));
    }
    if labels.props() != alphabet.len() {
        return Err(mismatch(
            format!("{} label columns", labels.props()),
            format!("{} propositions", alphabet.len()),
        ));
    }
    let edges = system
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| LabeledEdge {
            from: e.from,
            to: e.to,
            cost: e.cost,
            label: labels.symbol(i),
        })
        .collect();
    LabeledSystem::new(alphabet.clone(), system.vertex_count(), edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abstraction::{build_abstraction, AbstractionConfig};

    #[test]
    fn labels_follow_rows() {
        let mut c = AbstractionConfig::square(100.0, 4, 2);
        c.step = 0.05;
        let sys = build_abstraction(&c, 1).unwrap();
        let a = Alphabet::new(&["p", "q"]).unwrap();
        let l = LabelMatrix::new(sys.edge_count(), 2).unwrap();
        let ls = apply_labels(&sys, &l, &a).unwrap();
        assert!(ls.edges().iter().all(|e| e.label == AlphabetSymbol::EMPTY));
        let mut l = l;
        l.set(0, 0, true);
        let ls = apply_labels(&sys, &l, &a).unwrap();
        assert_eq!(ls.edges()[0].label, AlphabetSymbol(1));
        assert!(ls.edges()[1..]
            .iter()
            .all(|e| e.label == AlphabetSymbol::EMPTY));
        let short = LabelMatrix::new(1, 2).unwrap();
        assert!(apply_labels(&sys, &short, &a).is_err());
    }
}
