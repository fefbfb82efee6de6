use crate::label::{LabeledEdge, LabeledSystem};
use crate::ltl::{Alphabet, AlphabetSymbol};

/// "Never split lanes on two consecutive transitions."
pub const SPLIT_LANE_FORMULA: &str = "G (split_lane -> X !split_lane)";

/// A six-state, nine-transition lane-change example with unit and zero
/// costs. Its cheapest route `v0 v1 v3 v5` splits lanes twice in a row;
/// the cheapest route respecting [`SPLIT_LANE_FORMULA`] is `v0 v1 v4 v5`.
pub fn lane_change_instance() -> LabeledSystem<f64> {
    let alphabet = Alphabet::new(&["split_lane"]).expect("valid name");
    let split = AlphabetSymbol(1);
    let keep = AlphabetSymbol::EMPTY;
    let edges = [
        (0, 1, 1.0, split),
        (0, 2, 1.0, keep),
        (1, 3, 0.0, split),
        (1, 4, 0.0, keep),
        (2, 4, 1.0, keep),
        (3, 5, 0.0, keep),
        (4, 5, 1.0, keep),
        (3, 2, 0.0, split),
        (3, 4, 1.0, keep),
    ]
    .map(|(from, to, cost, label)| LabeledEdge {
        from,
        to,
        cost,
        label,
    });
    LabeledSystem::new(alphabet, 6, edges.to_vec()).expect("well-formed instance")
}
