//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use voxlabel::abstraction::{
    build_abstraction, footprint_polygon, AbstractionConfig, FootprintSpec, TransitionSystem,
};
use voxlabel::buchi::Verdict;
use voxlabel::label::{CsrBoolMatrix, LabeledSystem};
use voxlabel::ltl::{AlphabetSymbol, LassoWord, LtlFormula};
use voxlabel::workspace::{rasterize_box, AaBox, GridSpec, OccupancyBitset};

// ---------------------------------------------------------------- LTL

/// Truth of `f` at position `i` of `w`, by direct recursion on the
/// semantics. Every position reachable from `i` has a representative in
/// the window `[i, i + |stem| + |loop|)`, so bounded scans are exact.
pub fn holds_at(w: &LassoWord, f: &LtlFormula, i: usize) -> bool {
    use LtlFormula::*;
    let window = w.positions();
    match f {
        True => true,
        False => false,
        Atom(p) => w.at(i).contains(*p),
        Not(a) => !holds_at(w, a, i),
        Or(a, b) => holds_at(w, a, i) || holds_at(w, b, i),
        And(a, b) => holds_at(w, a, i) && holds_at(w, b, i),
        Implies(a, b) => !holds_at(w, a, i) || holds_at(w, b, i),
        Iff(a, b) => holds_at(w, a, i) == holds_at(w, b, i),
        Next(a) => holds_at(w, a, i + 1),
        Until(a, b) => {
            for j in i..i + window {
                if holds_at(w, b, j) {
                    return true;
                }
                if !holds_at(w, a, j) {
                    return false;
                }
            }
            false
        }
        Release(a, b) => {
            for j in i..i + window {
                if !holds_at(w, b, j) {
                    return false;
                }
                if holds_at(w, a, j) {
                    return true;
                }
            }
            true
        }
        Eventually(a) => (i..i + window).any(|j| holds_at(w, a, j)),
        Always(a) => (i..i + window).all(|j| holds_at(w, a, j)),
    }
}

pub fn holds(w: &LassoWord, f: &LtlFormula) -> bool {
    holds_at(w, f, 0)
}

/// Every word of exactly `len` letters over `props` propositions.
pub fn words(props: usize, len: usize) -> Vec<Vec<AlphabetSymbol>> {
    let letters = 1u64 << props;
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..letters).map(move |s| {
                    let mut w = w.clone();
                    w.push(AlphabetSymbol(s));
                    w
                })
            })
            .collect();
    }
    out
}

/// Whether some lasso `prefix · u · v^ω` with `|u| <= max_stem` and
/// `1 <= |v| <= max_loop` satisfies `f`.
pub fn has_model_extending(
    f: &LtlFormula,
    prefix: &[AlphabetSymbol],
    props: usize,
    max_stem: usize,
    max_loop: usize,
) -> bool {
    for ul in 0..=max_stem {
        for u in words(props, ul) {
            for vl in 1..=max_loop {
                for v in words(props, vl) {
                    let stem: Vec<_> = prefix.iter().copied().chain(u.iter().copied()).collect();
                    if holds(&LassoWord::new(stem, v).unwrap(), f) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// The first position at which `word` becomes a bad prefix, judged by
/// searching bounded lasso extensions.
pub fn oracle_verdict(f: &LtlFormula, word: &[AlphabetSymbol], props: usize) -> Verdict {
    for i in 0..word.len() {
        if !has_model_extending(f, &word[..=i], props, 2, 2) {
            return Verdict::BadPrefix(i);
        }
    }
    Verdict::Undetermined
}

/// Safety formulas over `split_lane` (s) and `moving_vehicle` (m), plus a
/// few liveness and unsatisfiable ones where every verdict is fixed.
pub const CORPUS: &[&str] = &[
    "G (split_lane -> X !split_lane)",
    "G !split_lane",
    "G (split_lane | moving_vehicle)",
    "G (split_lane -> moving_vehicle)",
    "G (split_lane -> X moving_vehicle)",
    "G (split_lane -> X X !split_lane)",
    "moving_vehicle R !split_lane",
    "X G !split_lane",
    "X X split_lane",
    "split_lane & X !split_lane",
    "G (split_lane & moving_vehicle -> X (!split_lane & !moving_vehicle))",
    "G (X split_lane -> moving_vehicle)",
    "!split_lane | X G moving_vehicle",
    "G (split_lane -> X (moving_vehicle | X moving_vehicle))",
    "split_lane -> G moving_vehicle",
    "G (moving_vehicle | X moving_vehicle)",
    "G !(split_lane & moving_vehicle)",
    "G split_lane | G moving_vehicle",
    "G (split_lane <-> X !split_lane)",
    "true",
    "G (moving_vehicle -> (moving_vehicle U split_lane))",
    "F split_lane",
    "G F moving_vehicle",
    "split_lane & !split_lane",
];

// ---------------------------------------------------------------- labeling

pub struct Scene {
    pub grid: GridSpec<f64>,
    pub system: TransitionSystem<f64>,
    pub footprint: FootprintSpec<f64>,
    pub boxes: Vec<Vec<AaBox<f64>>>,
    pub columns: Vec<OccupancyBitset>,
}

/// A roadmap over a 32 m square with up to `edges` transitions and
/// `props` propositions, each a union of one to three random boxes.
/// Odd grid bounds keep cell faces off the sample lattice.
pub fn random_scene(seed: u64, depth: u32, edges: usize, props: usize) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bounds = [
        (-1.3, 33.7),
        (-1.1, 33.9),
        (0.0, 8.0 + std::f64::consts::PI / 10.0),
    ];
    let grid = GridSpec::new(&bounds, depth).unwrap();
    let cfg = AbstractionConfig {
        target_edges: Some(edges),
        ..AbstractionConfig::square(32.0, edges, 3)
    };
    let system = build_abstraction(&cfg, seed).unwrap();
    let mut boxes = Vec::new();
    let mut columns = Vec::new();
    for _ in 0..props {
        let mut bs = Vec::new();
        let mut col = grid.empty_bitset().unwrap();
        for _ in 0..rng.random_range(1..=3) {
            let mut lo = Vec::new();
            let mut hi = Vec::new();
            for &(a, b) in &bounds {
                let w = rng.random_range(0.02..0.6) * (b - a);
                let l = rng.random_range(a - 0.1 * w..b - 0.9 * w);
                lo.push(l);
                hi.push(l + w);
            }
            let b = AaBox::new(lo, hi);
            col.union_with(&rasterize_box(&b, &grid).unwrap()).unwrap();
            bs.push(b);
        }
        boxes.push(bs);
        columns.push(col);
    }
    Scene {
        grid,
        system,
        footprint: FootprintSpec::default(),
        boxes,
        columns,
    }
}

/// `L[i][j] = OR_k M[i][k] AND P[k][j]`, evaluated on dense copies.
pub fn dense_labels(m: &CsrBoolMatrix<u32>, columns: &[OccupancyBitset]) -> Vec<Vec<bool>> {
    let cols = m.cols() as usize;
    let mut dense_m = vec![vec![false; cols]; m.rows()];
    for (i, row) in dense_m.iter_mut().enumerate() {
        for &c in m.row(i) {
            row[c as usize] = true;
        }
    }
    let dense_p: Vec<Vec<bool>> = (0..cols)
        .map(|k| columns.iter().map(|c| c.get(k as u64)).collect())
        .collect();
    let mut out = vec![vec![false; columns.len()]; m.rows()];
    for i in 0..m.rows() {
        for j in 0..columns.len() {
            for k in 0..cols {
                out[i][j] |= dense_m[i][k] && dense_p[k][j];
            }
        }
    }
    out
}

fn cell_range(lo: f64, hi: f64, a: f64, b: f64, n: u64) -> std::ops::Range<u64> {
    let w = (b - a) / n as f64;
    let first = (((lo - a) / w).floor() - 1.0).max(0.0) as u64;
    let last = ((((hi - a) / w).ceil() + 1.0).max(0.0) as u64).min(n);
    first.min(n)..last
}

/// Labels from the geometry alone: edge `i` carries proposition `j` when
/// some sample's footprint rectangle and some box of `j` both overlap the
/// same voxel with positive measure, in the time slab of the sample.
pub fn geometric_labels(scene: &Scene) -> Vec<Vec<bool>> {
    let g = &scene.grid;
    let n: Vec<u64> = (0..3).map(|a| g.axis_cells(a)).collect();
    let (lo, hi) = (g.lower(), g.upper());
    let w: Vec<f64> = (0..3).map(|a| (hi[a] - lo[a]) / n[a] as f64).collect();
    let edge = |a: usize, i: u64| lo[a] + w[a] * i as f64;
    (0..scene.system.edge_count())
        .map(|e| {
            let tr = scene.system.trajectory(e).unwrap();
            scene
                .boxes
                .iter()
                .map(|bs| {
                    tr.samples().iter().any(|s| {
                        let t = ((s.tau - lo[2]) / w[2]).floor() as u64;
                        let rect = footprint_polygon(s, &scene.footprint);
                        let (rlo, rhi) = rect.bounding_box();
                        bs.iter().any(|b| {
                            if !(b.lo[2] < edge(2, t + 1) && edge(2, t) < b.hi[2]) {
                                return false;
                            }
                            cell_range(rlo[0].max(b.lo[0]), rhi[0].min(b.hi[0]), lo[0], hi[0], n[0])
                                .any(|cx| {
                                    let (x0, x1) = (edge(0, cx), edge(0, cx + 1));
                                    b.lo[0] < x1
                                        && x0 < b.hi[0]
                                        && cell_range(
                                            rlo[1].max(b.lo[1]),
                                            rhi[1].min(b.hi[1]),
                                            lo[1],
                                            hi[1],
                                            n[1],
                                        )
                                        .any(|cy| {
                                            let (y0, y1) = (edge(1, cy), edge(1, cy + 1));
                                            b.lo[1] < y1
                                                && y0 < b.hi[1]
                                                && rect.overlaps_box([x0, y0], [x1, y1])
                                        })
                                })
                        })
                    })
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- planning

/// Best walk from `start` to any of `goal` among all walks of at most
/// `max_steps` edges whose label word passes `safe`: least cost, then
/// fewest steps, then lexicographically smallest vertex sequence.
pub fn best_walk(
    s: &LabeledSystem<f64>,
    start: usize,
    goal: &[usize],
    max_steps: usize,
    safe: &dyn Fn(&[AlphabetSymbol]) -> bool,
) -> Option<(f64, Vec<usize>)> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut stack = vec![(vec![start], Vec::<AlphabetSymbol>::new(), 0.0)];
    while let Some((vs, labels, cost)) = stack.pop() {
        if !safe(&labels) {
            continue;
        }
        let v = *vs.last().unwrap();
        if goal.contains(&v) {
            let better = match &best {
                None => true,
                Some((c, p)) => {
                    (cost, vs.len()) < (*c, p.len())
                        || ((cost, vs.len()) == (*c, p.len()) && vs < *p)
                }
            };
            if better {
                best = Some((cost, vs.clone()));
            }
            continue;
        }
        if vs.len() > max_steps {
            continue;
        }
        for e in s.edges().iter().filter(|e| e.from == v) {
            let mut vs2 = vs.clone();
            vs2.push(e.to);
            let mut l2 = labels.clone();
            l2.push(e.label);
            stack.push((vs2, l2, cost + e.cost));
        }
    }
    best
}
