use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use super::PlannerError;
use crate::buchi::{run_monitor, MonitorNfa, Verdict};
use crate::label::LabeledSystem;
use crate::ltl::{Alphabet, AlphabetSymbol};
use crate::Real;

/// Maps labels over the system's alphabet to symbols over the monitor's,
/// matching propositions by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelProjection {
    // bit j of the system symbol moves to bit map[j] (if any)
    map: Vec<Option<usize>>,
}

impl LabelProjection {
    pub fn new(system: &Alphabet, monitor: &Alphabet) -> Result<Self, PlannerError> {
        if let Some(missing) = monitor.names().iter().find(|n| system.id(n).is_none()) {
            return Err(PlannerError::AlphabetMismatch(missing.clone()));
        }
        Ok(LabelProjection {
            map: system.names().iter().map(|n| monitor.id(n)).collect(),
        })
    }

    pub fn apply(&self, s: AlphabetSymbol) -> AlphabetSymbol {
        s.ids().fold(AlphabetSymbol::EMPTY, |acc, j| {
            match self.map.get(j).copied().flatten() {
                Some(k) => acc.with(k),
                None => acc,
            }
        })
    }
}

/// A pair of transition-system state and monitor state.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
pub struct ProductVertex {
    pub v: usize,
    pub q: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductEdge<T> {
    /// Index of the target in [`ProductGraph::vertices`].
    pub to: usize,
    /// Index of the underlying edge in the labeled system.
    pub edge: usize,
    pub cost: T,
}

/// The part of `V × Q` reachable from the start pair, with vertex ids
/// assigned in breadth-first discovery order.
#[derive(Debug, Clone)]
pub struct ProductGraph<T> {
    vertices: Vec<ProductVertex>,
    index: HashMap<ProductVertex, usize>,
    offsets: Vec<usize>,
    edges: Vec<ProductEdge<T>>,
}

impl<T: Real> ProductGraph<T> {
    pub fn vertices(&self) -> &[ProductVertex] {
        &self.vertices
    }

    pub fn start(&self) -> ProductVertex {
        self.vertices[0]
    }

    pub fn vertex_id(&self, p: ProductVertex) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn out_edges(&self, i: usize) -> &[ProductEdge<T>] {
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Graphviz rendering; edge labels show the proposition set and cost.
    pub fn to_dot(&self, system: &LabeledSystem<T>) -> String {
        let a = system.alphabet();
        let mut out = String::from("digraph product {\n  rankdir=LR;\n");
        for (i, p) in self.vertices.iter().enumerate() {
            let shape = if i == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  n{i} [label=\"v{},q{}\", shape={shape}];", p.v, p.q);
        }
        for i in 0..self.vertices.len() {
            for e in self.out_edges(i) {
                let label = system.edges()[e.edge].label;
                let _ = writeln!(
                    out,
                    "  n{i} -> n{} [label=\"{{{}}} / {}\"];",
                    e.to,
                    a.symbol_names(label).join(","),
                    e.cost
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Outgoing edge ids per vertex, ascending.
pub(crate) fn adjacency<T: Real>(s: &LabeledSystem<T>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); s.vertex_count()];
    for (i, e) in s.edges().iter().enumerate() {
        adj[e.from].push(i);
    }
    adj
}

/// Expands `((v, q), (v', q'))` for every edge `(v, v')` and every live
/// monitor successor `q'` of `q` on the edge's label.
pub fn build_product<T: Real>(
    s: &LabeledSystem<T>,
    m: &MonitorNfa,
    v0: usize,
) -> Result<ProductGraph<T>, PlannerError> {
    if v0 >= s.vertex_count() {
        return Err(PlannerError::UnknownVertex(v0));
    }
    let proj = LabelProjection::new(s.alphabet(), m.automaton().alphabet())?;
    let adj = adjacency(s);
    let start = ProductVertex {
        v: v0,
        q: m.initial(),
    };
    let mut vertices = vec![start];
    let mut index = HashMap::from([(start, 0)]);
    let mut offsets = vec![0];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let ProductVertex { v, q } = vertices[i];
        for &e in &adj[v] {
            let edge = &s.edges()[e];
            let sym = proj.apply(edge.label);
            let mut succ: Vec<usize> = m.step(q, sym).collect();
            succ.dedup();
            for q2 in succ {
                let p = ProductVertex { v: edge.to, q: q2 };
                let to = *index.entry(p).or_insert_with(|| {
                    vertices.push(p);
                    queue.push_back(vertices.len() - 1);
                    vertices.len() - 1
                });
                edges.push(ProductEdge {
                    to,
                    edge: e,
                    cost: edge.cost,
                });
            }
        }
        // vertices are dequeued in id order, so offsets line up
        offsets.push(edges.len());
    }
    Ok(ProductGraph {
        vertices,
        index,
        offsets,
        edges,
    })
}

/// Monitors the label word induced by a state sequence. Between states
/// joined by several edges, the lowest edge id is used.
pub fn check_trace<T: Real>(
    s: &LabeledSystem<T>,
    m: &MonitorNfa,
    trace: &[usize],
) -> Result<Verdict, PlannerError> {
    if let Some(&v) = trace.iter().find(|&&v| v >= s.vertex_count()) {
        return Err(PlannerError::UnknownVertex(v));
    }
    let proj = LabelProjection::new(s.alphabet(), m.automaton().alphabet())?;
    let adj = adjacency(s);
    let mut word = Vec::with_capacity(trace.len().saturating_sub(1));
    for (index, w) in trace.windows(2).enumerate() {
        let e =
            adj[w[0]]
                .iter()
                .find(|&&e| s.edges()[e].to == w[1])
                .ok_or(PlannerError::NonEdge {
                    index,
                    from: w[0],
                    to: w[1],
                })?;
        word.push(proj.apply(s.edges()[*e].label));
    }
    Ok(run_monitor(m, &word))
}
