use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{PlannerError, ProductGraph, ProductVertex};
use crate::label::LabeledSystem;
use crate::Real;

/// A product path with the system edges it follows.
#[derive(Debug, Clone, PartialEq)]
pub struct Path<T> {
    pub vertices: Vec<ProductVertex>,
    /// System edge ids, one per step.
    pub edges: Vec<usize>,
    pub cost: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStep {
    pub edge: usize,
    pub from: ProductVertex,
    pub to: ProductVertex,
    pub labels: Vec<String>,
    pub cost: f64,
}

/// JSON form of a [`Path`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathDocument {
    pub cost: f64,
    pub vertices: Vec<ProductVertex>,
    pub steps: Vec<PathStep>,
}

impl<T: Real> Path<T> {
    pub fn states(&self) -> Vec<usize> {
        self.vertices.iter().map(|p| p.v).collect()
    }

    pub fn monitor_states(&self) -> Vec<usize> {
        self.vertices.iter().map(|p| p.q).collect()
    }

    pub fn to_document(&self, system: &LabeledSystem<T>) -> PathDocument {
        let steps = self
            .edges
            .iter()
            .zip(self.vertices.windows(2))
            .map(|(&e, w)| {
                let edge = &system.edges()[e];
                PathStep {
                    edge: e,
                    from: w[0],
                    to: w[1],
                    labels: system
                        .alphabet()
                        .symbol_names(edge.label)
                        .into_iter()
                        .map(String::from)
                        .collect(),
                    cost: edge.cost.as_f64(),
                }
            })
            .collect();
        PathDocument {
            cost: self.cost.as_f64(),
            vertices: self.vertices.clone(),
            steps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Key<T> {
    cost: T,
    hops: usize,
}

impl<T: Real> Eq for Key<T> {}

impl<T: Real> Ord for Key<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .partial_cmp(&other.cost)
            .unwrap_or(Ordering::Equal)
            .then(self.hops.cmp(&other.hops))
    }
}

impl<T: Real> PartialOrd for Key<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimum-cost path from the product's start to any vertex whose system
/// component is in `goal`. Ties are broken by fewer steps, then by the
/// lexicographically smallest vertex sequence.
pub fn shortest_safe_path<T: Real>(
    g: &ProductGraph<T>,
    goal: &[usize],
) -> Result<Option<Path<T>>, PlannerError> {
    let n = g.vertices().len();
    for i in 0..n {
        for e in g.out_edges(i) {
            if !(e.cost >= T::zero()) {
                return Err(PlannerError::NegativeWeight {
                    edge: e.edge,
                    weight: e.cost.as_f64(),
                });
            }
        }
    }
    let is_goal = |i: usize| goal.contains(&g.vertices()[i].v);

    let mut dist: Vec<Option<Key<T>>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[0] = Some(Key {
        cost: T::zero(),
        hops: 0,
    });
    heap.push(Reverse((
        Key {
            cost: T::zero(),
            hops: 0,
        },
        0usize,
    )));
    let mut best: Option<Key<T>> = None;
    while let Some(Reverse((k, i))) = heap.pop() {
        if done[i] || best.is_some_and(|b| k > b) {
            continue;
        }
        done[i] = true;
        if is_goal(i) {
            best = Some(best.map_or(k, |b| b.min(k)));
            continue;
        }
        for e in g.out_edges(i) {
            let nk = Key {
                cost: k.cost + e.cost,
                hops: k.hops + 1,
            };
            if dist[e.to].is_none_or(|d| nk < d) {
                dist[e.to] = Some(nk);
                heap.push(Reverse((nk, e.to)));
            }
        }
    }
    let Some(best) = best else {
        return Ok(None);
    };
    let tight = |i: usize, to: usize, c: T| {
        let (Some(a), Some(b)) = (dist[i], dist[to]) else {
            return false;
        };
        a.cost + c == b.cost && a.hops + 1 == b.hops
    };
    // vertices that lie on some optimal route to an optimal goal
    let terminal = |i: usize| is_goal(i) && dist[i] == Some(best);
    let mut useful = vec![false; n];
    let mut order: Vec<usize> = (0..n)
        .filter(|&i| dist[i].is_some_and(|d| d.hops <= best.hops))
        .collect();
    order.sort_by_key(|&i| Reverse(dist[i].unwrap().hops));
    for &i in &order {
        useful[i] = terminal(i)
            || (!is_goal(i)
                && g.out_edges(i)
                    .iter()
                    .any(|e| useful[e.to] && tight(i, e.to, e.cost)));
    }
    // Walk the optimal routes layer by layer, keeping every product vertex
    // that is reachable along the smallest system-vertex prefix so far.
    // Each entry is (product vertex, index of its parent in the previous
    // layer, edge taken).
    let mut layers: Vec<Vec<(usize, usize, usize)>> = vec![vec![(0, 0, usize::MAX)]];
    while !layers.last().unwrap().iter().any(|&(i, _, _)| terminal(i)) {
        let frontier = layers.last().unwrap();
        let mut next: Vec<(usize, usize, usize)> = Vec::new();
        for (k, &(i, _, _)) in frontier.iter().enumerate() {
            for e in g
                .out_edges(i)
                .iter()
                .filter(|e| useful[e.to] && tight(i, e.to, e.cost))
            {
                next.push((e.to, k, e.edge));
            }
        }
        let v = next
            .iter()
            .map(|&(to, _, _)| g.vertices()[to].v)
            .min()
            .expect("an optimal route continues from every useful vertex");
        next.retain(|&(to, _, _)| g.vertices()[to].v == v);
        next.sort_by_key(|&(to, k, edge)| (g.vertices()[to], edge, k));
        next.dedup_by_key(|&mut (to, _, _)| to);
        layers.push(next);
    }
    let last = layers.last().unwrap();
    let mut k = (0..last.len())
        .filter(|&k| terminal(last[k].0))
        .min_by_key(|&k| g.vertices()[last[k].0])
        .unwrap();
    let mut vertices = Vec::with_capacity(layers.len());
    let mut edges = Vec::with_capacity(layers.len() - 1);
    for layer in layers.iter().rev() {
        let (i, parent, edge) = layer[k];
        vertices.push(g.vertices()[i]);
        if edge != usize::MAX {
            edges.push(edge);
        }
        k = parent;
    }
    vertices.reverse();
    edges.reverse();
    Ok(Some(Path {
        vertices,
        edges,
        cost: best.cost,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::buchi::{ltl_to_buchi, MonitorNfa};
    use crate::label::LabeledEdge;
    use crate::ltl::{parse_ltl, Alphabet, AlphabetSymbol};
    use crate::planner::build_product;

    fn neutral(a: &Alphabet) -> MonitorNfa {
        MonitorNfa::new(ltl_to_buchi(&parse_ltl("true", a).unwrap(), a).unwrap())
    }

    fn system(n: usize, edges: &[(usize, usize, f64)]) -> LabeledSystem<f64> {
        let a = Alphabet::new(&["p"]).unwrap();
        let e = edges
            .iter()
            .map(|&(from, to, cost)| LabeledEdge {
                from,
                to,
                cost,
                label: AlphabetSymbol(0),
            })
            .collect();
        LabeledSystem::new(a, n, e).unwrap()
    }

    #[test]
    fn start_in_goal() {
        let s = system(2, &[(0, 1, 1.0)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        let p = shortest_safe_path(&g, &[0]).unwrap().unwrap();
        assert_eq!(p.cost, 0.0);
        assert!(p.edges.is_empty());
        assert_eq!(p.vertices.len(), 1);
    }

    #[test]
    fn unreachable() {
        let s = system(3, &[(0, 1, 1.0)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        assert_eq!(shortest_safe_path(&g, &[2]).unwrap(), None);
    }

    #[test]
    fn negative_weight() {
        let s = system(2, &[(0, 1, -1.0)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        assert!(matches!(
            shortest_safe_path(&g, &[1]),
            Err(PlannerError::NegativeWeight { edge: 0, .. })
        ));
    }

    #[test]
    fn ties_prefer_fewer_steps_then_smaller_ids() {
        let s = system(
            5,
            &[
                (0, 2, 1.0),
                (0, 1, 1.0),
                (1, 4, 1.0),
                (2, 4, 1.0),
                (0, 3, 0.0),
                (3, 4, 2.0),
                (0, 4, 2.0),
            ],
        );
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        let p = shortest_safe_path(&g, &[4]).unwrap().unwrap();
        assert_eq!(p.states(), vec![0, 4]);
        assert_eq!(p.edges, vec![6]);
        let s = system(5, &[(0, 2, 1.0), (0, 1, 1.0), (1, 4, 1.0), (2, 4, 1.0)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        assert_eq!(
            shortest_safe_path(&g, &[4]).unwrap().unwrap().states(),
            vec![0, 1, 4]
        );
    }

    #[test]
    fn parallel_edges_use_lowest_id() {
        let s = system(2, &[(0, 1, 1.0), (0, 1, 1.0), (0, 1, 0.5)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        assert_eq!(
            shortest_safe_path(&g, &[1]).unwrap().unwrap().edges,
            vec![2]
        );
        let s = system(2, &[(0, 1, 1.0), (0, 1, 1.0)]);
        let g = build_product(&s, &neutral(s.alphabet()), 0).unwrap();
        assert_eq!(
            shortest_safe_path(&g, &[1]).unwrap().unwrap().edges,
            vec![0]
        );
    }
}
