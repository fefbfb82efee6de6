use std::collections::{HashMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    integrate_constant, sweep_cells, AbstractionError, ControlInput, FootprintSpec, State5,
    Trajectory, VehicleParams,
};
use crate::label::{ColIndex, CsrBoolMatrix};
use crate::scalar::wrap_angle;
use crate::workspace::GridSpec;
use crate::Real;

/// Ranges used to normalize state differences. Positions share one scale,
/// the larger of the `x` and `y` ranges, so that distances are unchanged
/// by rotations of the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateScale<T> {
    pub x: T,
    pub y: T,
    pub theta: T,
    pub v: T,
    pub tau: T,
}

impl<T: Real> StateScale<T> {
    fn position(&self) -> T {
        self.x.max(self.y)
    }

    fn components(&self, s: &State5<T>) -> [T; 5] {
        let p = self.position();
        [
            s.x / p,
            s.y / p,
            s.theta / self.theta,
            s.v / self.v,
            s.tau / self.tau,
        ]
    }

    /// Largest normalized difference, taking the Euclidean distance of
    /// positions; heading differences wrap.
    pub fn distance(&self, a: &State5<T>, b: &State5<T>) -> T {
        let dp = (a.x - b.x).hypot(a.y - b.y) / self.position();
        let dth = wrap_angle(a.theta - b.theta).abs() / self.theta;
        [dth, (a.v - b.v) / self.v, (a.tau - b.tau) / self.tau]
            .into_iter()
            .fold(dp, |m, d| m.max(d.abs()))
    }
}

/// A motion between two vertices: constant control held for `duration`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge<T> {
    pub from: usize,
    pub to: usize,
    pub control: ControlInput<T>,
    pub duration: T,
    pub cost: T,
}

/// Directed graph of vehicle states whose edges are dynamically feasible
/// motions. Edge trajectories are regenerated from the source state and
/// the stored control.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionSystem<T> {
    pub(crate) states: Vec<State5<T>>,
    pub(crate) edges: Vec<Edge<T>>,
    pub(crate) step: T,
    pub(crate) vehicle: VehicleParams<T>,
    pub(crate) scale: StateScale<T>,
    pub(crate) eps_end: T,
    pub(crate) config: Option<serde_json::Value>,
}

impl<T: Real> TransitionSystem<T> {
    pub fn new(
        states: Vec<State5<T>>,
        edges: Vec<Edge<T>>,
        step: T,
        vehicle: VehicleParams<T>,
        scale: StateScale<T>,
        eps_end: T,
    ) -> Result<Self, AbstractionError> {
        if !(step > T::zero()) {
            return Err(AbstractionError::InvalidStep(step.as_f64()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.from >= states.len() || e.to >= states.len() {
                return Err(AbstractionError::Malformed(format!(
                    "edge {i} references a missing vertex"
                )));
            }
            if !(e.cost >= T::zero()) {
                return Err(AbstractionError::Malformed(format!(
                    "edge {i} has negative cost"
                )));
            }
        }
        Ok(TransitionSystem {
            states,
            edges,
            step,
            vehicle,
            scale,
            eps_end,
            config: None,
        })
    }

    pub fn states(&self) -> &[State5<T>] {
        &self.states
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.states.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn step(&self) -> T {
        self.step
    }

    pub fn vehicle(&self) -> &VehicleParams<T> {
        &self.vehicle
    }

    pub fn scale(&self) -> &StateScale<T> {
        &self.scale
    }

    pub fn eps_end(&self) -> T {
        self.eps_end
    }

    /// Configuration the system was built from, if recorded.
    pub fn config(&self) -> Option<&serde_json::Value> {
        self.config.as_ref()
    }

    /// Re-integrates edge `i` from its source state.
    pub fn trajectory(&self, i: usize) -> Result<Trajectory<T>, AbstractionError> {
        let e = &self.edges[i];
        integrate_constant(
            self.states[e.from],
            e.control,
            self.step,
            e.duration,
            &self.vehicle,
        )
    }

    /// Normalized distance between edge `i`'s re-integrated end state and
    /// its target vertex.
    pub fn endpoint_error(&self, i: usize) -> Result<T, AbstractionError> {
        let end = self.trajectory(i)?.end();
        Ok(self.scale.distance(&end, &self.states[self.edges[i].to]))
    }

    /// Checks every edge against `eps_end`.
    pub fn verify_endpoints(&self) -> Result<(), AbstractionError> {
        let bad = (0..self.edges.len())
            .into_par_iter()
            .map(|i| self.endpoint_error(i).map(|err| (i, err)))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .find(|&(_, err)| err > self.eps_end);
        match bad {
            Some((i, err)) => Err(AbstractionError::EndpointMismatch {
                edge: i,
                error: err.as_f64(),
            }),
            None => Ok(()),
        }
    }

    /// Swept volumes of all edges as CSR rows, computed in parallel and
    /// assembled in edge order.
    pub fn swept_volumes<I: ColIndex>(
        &self,
        footprint: &FootprintSpec<T>,
        grid: &GridSpec<T>,
    ) -> Result<CsrBoolMatrix<I>, AbstractionError> {
        let rows = (0..self.edges.len())
            .into_par_iter()
            .map(|i| sweep_cells(&self.trajectory(i)?, footprint, grid))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CsrBoolMatrix::from_sorted_rows(grid.cell_count(), rows)?)
    }
}

/// Distribution of the target states that steer motion selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetSampling<T> {
    /// Uniform over the position, heading, and speed ranges.
    Uniform,
    /// Counterclockwise travel around a circle: targets lie `lookahead`
    /// metres ahead along the circle with a lateral offset drawn from
    /// `[-lateral, lateral]`, heading tangent. States farther than
    /// `corridor` from the circle are inadmissible.
    Loop {
        center: [T; 2],
        radius: T,
        lateral: T,
        lookahead: T,
        corridor: T,
    },
}

/// Parameters of the roadmap construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbstractionConfig<T> {
    pub initial: State5<T>,
    pub x_range: [T; 2],
    pub y_range: [T; 2],
    pub speed_range: [T; 2],
    /// Latest admissible `tau`.
    pub horizon: T,
    /// Maximum number of vertices expanded.
    pub vertex_count: usize,
    /// Motions kept per expanded vertex.
    pub neighbors: usize,
    pub steer_levels: Vec<T>,
    pub accel_levels: Vec<T>,
    pub primitive_duration: T,
    pub step: T,
    pub vehicle: VehicleParams<T>,
    pub eps_end: T,
    /// Stop once this many edges exist.
    pub target_edges: Option<usize>,
    pub sampling: TargetSampling<T>,
}

impl<T: Real> AbstractionConfig<T> {
    /// A roadmap over `[0, extent]^2` starting at the center.
    pub fn square(extent: T, vertex_count: usize, neighbors: usize) -> Self {
        let l = |x: f64| T::lit(x);
        AbstractionConfig {
            initial: State5::new(
                extent / l(2.0),
                extent / l(2.0),
                T::zero(),
                l(8.0),
                T::zero(),
            ),
            x_range: [T::zero(), extent],
            y_range: [T::zero(), extent],
            speed_range: [T::zero(), l(15.0)],
            horizon: l(8.0),
            vertex_count,
            neighbors,
            steer_levels: [-0.3, -0.1, 0.0, 0.1, 0.3].map(l).to_vec(),
            accel_levels: [-2.0, 0.0, 2.0].map(l).to_vec(),
            primitive_duration: l(0.5),
            step: l(0.01),
            vehicle: VehicleParams::default(),
            eps_end: l(1e-3),
            target_edges: None,
            sampling: TargetSampling::Uniform,
        }
    }

    pub fn scale(&self) -> StateScale<T> {
        StateScale {
            x: self.x_range[1] - self.x_range[0],
            y: self.y_range[1] - self.y_range[0],
            theta: T::PI() + T::PI(),
            v: self.speed_range[1] - self.speed_range[0],
            tau: self.horizon,
        }
    }

    fn validate(&self) -> Result<(), AbstractionError> {
        let bad = |m: &str| Err(AbstractionError::Config(m.to_string()));
        let s = self.scale();
        if !(s.x > T::zero() && s.y > T::zero() && s.v > T::zero() && s.tau > T::zero()) {
            return bad("ranges and horizon must be nonempty");
        }
        if self.vertex_count == 0 || self.neighbors == 0 {
            return bad("vertex count and neighbor count must be positive");
        }
        if self.steer_levels.is_empty() || self.accel_levels.is_empty() {
            return bad("control grids must be nonempty");
        }
        if !(self.eps_end > T::zero()) {
            return bad("endpoint tolerance must be positive");
        }
        if !self.admissible(&self.initial) {
            return bad("initial state lies outside the configured ranges");
        }
        for &d in &self.steer_levels {
            for &a in &self.accel_levels {
                self.vehicle.check(&ControlInput::new(d, a))?;
            }
        }
        Ok(())
    }

    fn admissible(&self, s: &State5<T>) -> bool {
        if let TargetSampling::Loop {
            center,
            radius,
            corridor,
            ..
        } = self.sampling
        {
            let r = (s.x - center[0]).hypot(s.y - center[1]);
            if (r - radius).abs() > corridor {
                return false;
            }
        }
        s.x >= self.x_range[0]
            && s.x < self.x_range[1]
            && s.y >= self.y_range[0]
            && s.y < self.y_range[1]
            && s.v >= self.speed_range[0]
            && s.v <= self.speed_range[1]
            && s.tau <= self.horizon
    }

    /// Feasible motions from `s`, as (control, end state).
    fn candidates(&self, s: State5<T>) -> Vec<(ControlInput<T>, State5<T>)> {
        let mut out = Vec::new();
        for &d in &self.steer_levels {
            for &a in &self.accel_levels {
                let u = ControlInput::new(d, a);
                let Ok(tr) =
                    integrate_constant(s, u, self.step, self.primitive_duration, &self.vehicle)
                else {
                    continue;
                };
                if tr.samples().iter().all(|x| self.admissible(x)) {
                    out.push((u, tr.end()));
                }
            }
        }
        out
    }

    fn sample_target(&self, s: &State5<T>, rng: &mut ChaCha8Rng) -> State5<T> {
        let u =
            |rng: &mut ChaCha8Rng, r: [T; 2]| r[0] + (r[1] - r[0]) * T::lit(rng.random::<f64>());
        let speed = u(rng, self.speed_range);
        match self.sampling {
            TargetSampling::Uniform => State5::new(
                u(rng, self.x_range),
                u(rng, self.y_range),
                T::lit(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)),
                speed,
                T::zero(),
            ),
            TargetSampling::Loop {
                center,
                radius,
                lateral,
                lookahead,
                ..
            } => {
                let phi = (s.y - center[1]).atan2(s.x - center[0]) + lookahead / radius;
                let r = radius + u(rng, [-lateral, lateral]);
                let (sn, cs) = phi.sin_cos();
                State5::new(
                    center[0] + r * cs,
                    center[1] + r * sn,
                    phi + T::FRAC_PI_2(),
                    speed,
                    T::zero(),
                )
            }
        }
    }

    /// Picks up to `neighbors` motions, each the unpicked one ending closest
    /// to a uniformly drawn target state.
    fn choose(&self, s: State5<T>, rng: &mut ChaCha8Rng) -> Vec<(ControlInput<T>, State5<T>)> {
        let mut pool = self.candidates(s);
        let scale = self.scale();
        let mut picked = Vec::new();
        while picked.len() < self.neighbors && !pool.is_empty() {
            let target = self.sample_target(&s, rng);
            let dist = |e: &State5<T>| {
                scale.distance(
                    &State5 {
                        tau: T::zero(),
                        ..*e
                    },
                    &target,
                )
            };
            let best = (0..pool.len())
                .min_by(|&i, &j| {
                    dist(&pool[i].1)
                        .partial_cmp(&dist(&pool[j].1))
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
            picked.push(pool.swap_remove(best));
        }
        picked
    }
}

/// Spatial hash over normalized states for endpoint merging.
struct VertexIndex<T> {
    scale: StateScale<T>,
    cell: T,
    buckets: HashMap<[i64; 5], Vec<usize>>,
}

impl<T: Real> VertexIndex<T> {
    fn key(&self, s: &State5<T>) -> [i64; 5] {
        self.scale
            .components(s)
            .map(|c| (c / self.cell).floor().to_i64().unwrap_or(i64::MAX))
    }

    fn insert(&mut self, id: usize, s: &State5<T>) {
        self.buckets.entry(self.key(s)).or_default().push(id);
    }

    fn nearest_within(&self, s: &State5<T>, states: &[State5<T>]) -> Option<usize> {
        let base = self.key(s);
        let mut best: Option<(T, usize)> = None;
        for code in 0..243 {
            let mut k = base;
            let mut c = code;
            for slot in &mut k {
                *slot += c % 3 - 1;
                c /= 3;
            }
            for &id in self.buckets.get(&k).into_iter().flatten() {
                let d = self.scale.distance(s, &states[id]);
                if d <= self.cell && best.is_none_or(|(bd, bid)| (d, id) < (bd, bid)) {
                    best = Some((d, id));
                }
            }
        }
        best.map(|(_, id)| id)
    }
}

/// Builds a roadmap by breadth-first expansion of motion fans from the
/// initial state. Endpoints within `eps_end` of an existing vertex are
/// merged into it. Deterministic for a given seed regardless of thread
/// count.
pub fn build_abstraction<T: Real>(
    cfg: &AbstractionConfig<T>,
    seed: u64,
) -> Result<TransitionSystem<T>, AbstractionError> {
    cfg.validate()?;
    let scale = cfg.scale();
    let mut states = vec![cfg.initial];
    let mut edges = Vec::new();
    let mut index = VertexIndex {
        scale,
        cell: cfg.eps_end,
        buckets: HashMap::new(),
    };
    index.insert(0, &cfg.initial);
    let mut queue = VecDeque::from([0usize]);
    let mut expanded = 0usize;
    let target = cfg.target_edges.unwrap_or(usize::MAX);
    'outer: while !queue.is_empty() && expanded < cfg.vertex_count && edges.len() < target {
        let take = queue.len().min(cfg.vertex_count - expanded);
        let batch: Vec<usize> = queue.drain(..take).collect();
        expanded += batch.len();
        let fans: Vec<Vec<(ControlInput<T>, State5<T>)>> = batch
            .par_iter()
            .map(|&v| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(v as u64);
                cfg.choose(states[v], &mut rng)
            })
            .collect();
        if states.len() == 1 && fans[0].is_empty() {
            return Err(AbstractionError::Infeasible(
                "no feasible motion leaves the initial state".into(),
            ));
        }
        for (&from, fan) in batch.iter().zip(fans) {
            for (control, end) in fan {
                if edges.len() >= target {
                    break 'outer;
                }
                let to = match index.nearest_within(&end, &states) {
                    Some(id) => id,
                    None => {
                        states.push(end);
                        index.insert(states.len() - 1, &end);
                        queue.push_back(states.len() - 1);
                        states.len() - 1
                    }
                };
                edges.push(Edge {
                    from,
                    to,
                    control,
                    duration: cfg.primitive_duration,
                    cost: cfg.primitive_duration,
                });
            }
        }
    }
    log::debug!(
        "roadmap: {} vertices, {} edges, {} expanded",
        states.len(),
        edges.len(),
        expanded
    );
    let mut sys = TransitionSystem::new(states, edges, cfg.step, cfg.vehicle, scale, cfg.eps_end)?;
    sys.config = Some(config_json(cfg, seed)?);
    Ok(sys)
}

fn config_json<T: Real>(
    cfg: &AbstractionConfig<T>,
    seed: u64,
) -> Result<serde_json::Value, AbstractionError> {
    let mut v = serde_json::to_value(cfg)?;
    v["seed"] = seed.into();
    Ok(v)
}

/// Rigid motion of the plane plus a time shift.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Displacement<T> {
    pub dx: T,
    pub dy: T,
    pub dtheta: T,
    pub dt: T,
}

impl<T: Real> Displacement<T> {
    /// Rotates the position about the origin by `dtheta`, then translates.
    pub fn apply(&self, s: &State5<T>) -> State5<T> {
        let (sn, cs) = self.dtheta.sin_cos();
        State5::new(
            cs * s.x - sn * s.y + self.dx,
            sn * s.x + cs * s.y + self.dy,
            s.theta + self.dtheta,
            s.v,
            s.tau + self.dt,
        )
    }
}

/// Moves every vertex by `delta`; controls, costs, and connectivity are
/// kept. Vertices leaving `grid` are reported with a warning.
pub fn translate_system<T: Real>(
    s: &TransitionSystem<T>,
    delta: Displacement<T>,
    grid: Option<&GridSpec<T>>,
) -> TransitionSystem<T> {
    let mut out = s.clone();
    for st in &mut out.states {
        *st = delta.apply(st);
    }
    if let Some(g) = grid {
        let outside = out
            .states
            .iter()
            .filter(|p| {
                g.axis_cell(0, p.x).is_none()
                    || g.axis_cell(1, p.y).is_none()
                    || (g.dims() > 2 && g.axis_cell(2, p.tau).is_none())
            })
            .count();
        if outside > 0 {
            log::warn!(
                "{outside} of {} translated vertices lie outside the workspace",
                out.states.len()
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> AbstractionConfig<f64> {
        let mut c = AbstractionConfig::square(100.0, 10, 2);
        c.step = 0.05;
        c
    }

    #[test]
    fn smoke() {
        let sys = build_abstraction(&small(), 1).unwrap();
        assert!(sys.vertex_count() >= 10);
        assert_eq!(sys.edge_count(), 20);
        sys.verify_endpoints().unwrap();
        // every vertex reachable from the initial one
        let mut seen = vec![false; sys.vertex_count()];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(v) = stack.pop() {
            for e in sys.edges().iter().filter(|e| e.from == v) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        assert!(seen.iter().all(|&b| b));
        assert!(sys.edges().iter().all(|e| e.cost == 0.5));
    }

    #[test]
    fn deterministic_per_seed() {
        let a = build_abstraction(&small(), 7).unwrap();
        let b = build_abstraction(&small(), 7).unwrap();
        let c = build_abstraction(&small(), 8).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.states(), c.states());
    }

    #[test]
    fn target_edges_truncates() {
        let mut c = small();
        c.vertex_count = 1000;
        c.target_edges = Some(37);
        assert_eq!(build_abstraction(&c, 3).unwrap().edge_count(), 37);
    }

    #[test]
    fn infeasible_start() {
        let mut c = small();
        c.initial = State5::new(99.9, 50.0, 0.0, 10.0, 0.0);
        assert!(matches!(
            build_abstraction(&c, 1),
            Err(AbstractionError::Infeasible(_))
        ));
        c.neighbors = 0;
        assert!(matches!(
            build_abstraction(&c, 1),
            Err(AbstractionError::Config(_))
        ));
    }

    #[test]
    fn merging_reuses_vertices() {
        // duplicated control: both motions of a fan end at the same state
        let mut c = small();
        c.steer_levels = vec![0.0, 0.0];
        c.accel_levels = vec![0.0];
        c.neighbors = 2;
        c.vertex_count = 3;
        let sys = build_abstraction(&c, 0).unwrap();
        assert_eq!(sys.vertex_count(), 4);
        assert_eq!(sys.edge_count(), 6);
        assert!(sys.edges().chunks(2).all(|p| p[0].to == p[1].to));
    }

    #[test]
    fn identity_translation() {
        let sys = build_abstraction(&small(), 2).unwrap();
        assert_eq!(translate_system(&sys, Displacement::default(), None), sys);
    }

    #[test]
    fn rotation_preserves_feasibility() {
        let sys = build_abstraction(&small(), 2).unwrap();
        let d = Displacement {
            dx: 3.0,
            dy: -4.0,
            dtheta: 0.7,
            dt: 1.5,
        };
        let moved = translate_system(&sys, d, None);
        moved.verify_endpoints().unwrap();
        for i in 0..sys.edge_count() {
            let a = sys.trajectory(i).unwrap();
            let b = moved.trajectory(i).unwrap();
            for (p, q) in a.samples().iter().zip(b.samples()) {
                let r = d.apply(p);
                assert!((r.x - q.x).abs() < 1e-9 && (r.y - q.y).abs() < 1e-9);
                assert!(wrap_angle(r.theta - q.theta).abs() < 1e-9);
                assert!((q.tau - p.tau - 1.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn loop_sampling_stays_in_corridor() {
        let mut c = AbstractionConfig::square(64.0, 200, 3);
        c.step = 0.05;
        c.initial = State5::new(52.0, 32.0, std::f64::consts::FRAC_PI_2, 8.0, 0.0);
        c.sampling = TargetSampling::Loop {
            center: [32.0, 32.0],
            radius: 20.0,
            lateral: 1.5,
            lookahead: 6.0,
            corridor: 3.0,
        };
        let sys = build_abstraction(&c, 5).unwrap();
        assert!(sys.edge_count() > 300);
        for s in sys.states() {
            assert!(((s.x - 32.0).hypot(s.y - 32.0) - 20.0).abs() <= 3.0);
        }
        // travel is counterclockwise: angular position grows along edges
        let mut forward = 0;
        for e in sys.edges() {
            let a = &sys.states()[e.from];
            let b = &sys.states()[e.to];
            let da = (b.y - 32.0).atan2(b.x - 32.0) - (a.y - 32.0).atan2(a.x - 32.0);
            forward += usize::from(wrap_angle(da) > 0.0);
        }
        assert_eq!(forward, sys.edge_count());
    }

    #[test]
    fn heading_wrap_in_distance() {
        let s = StateScale {
            x: 1.0,
            y: 1.0,
            theta: 2.0 * std::f64::consts::PI,
            v: 1.0,
            tau: 1.0,
        };
        let a = State5::new(0.0, 0.0, std::f64::consts::PI - 1e-4, 0.0, 0.0);
        let b = State5::new(0.0, 0.0, 1e-4 - std::f64::consts::PI, 0.0, 0.0);
        assert!(s.distance(&a, &b) < 1e-3);
    }
}
