use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::abstraction::{footprint_polygon, FootprintSpec, State5};
use crate::workspace::{rasterize_box, AaBox, GridSpec, OccupancyBitset};

pub const MOVING_VEHICLE: &str = "moving_vehicle";
pub const NOT_NOMINAL_LANE: &str = "not_nominal_lane";

/// Loop geometry and traffic. The loop is centered at the origin and
/// traversed counterclockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioConfig {
    pub loop_radius: f64,
    pub lane_width: f64,
    pub agent_count: usize,
    pub agent_speed: [f64; 2],
    /// Largest lateral offset of an agent from the lane center.
    pub agent_lateral: f64,
    pub agent_length: f64,
    pub agent_width: f64,
    pub horizon: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            loop_radius: 22.0,
            lane_width: 3.5,
            agent_count: 2,
            agent_speed: [4.0, 12.0],
            agent_lateral: 3.5,
            agent_length: 4.5,
            agent_width: 1.8,
            horizon: 8.0,
            seed: 0,
        }
    }
}

/// Proposition volumes of one labeling query.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub moving_vehicle: OccupancyBitset,
    pub not_nominal_lane: OccupancyBitset,
}

impl Scenario {
    /// Columns in the order `[moving_vehicle, not_nominal_lane]`.
    pub fn columns(&self) -> [&OccupancyBitset; 2] {
        [&self.moving_vehicle, &self.not_nominal_lane]
    }
}

/// One agent: angular position at `tau = 0`, lateral offset, speed.
#[derive(Debug, Clone, Copy)]
struct Agent {
    phase: f64,
    offset: f64,
    speed: f64,
}

impl Agent {
    fn state(&self, radius: f64, t: f64) -> State5<f64> {
        let r = radius + self.offset;
        let phi = self.phase + self.speed * t / r;
        State5::new(
            r * phi.cos(),
            r * phi.sin(),
            phi + std::f64::consts::FRAC_PI_2,
            self.speed,
            t,
        )
    }
}

fn check(cfg: &ScenarioConfig, g: &GridSpec<f64>) -> Result<(), BenchError> {
    let bad = |m: String| Err(BenchError::Scenario(m));
    if g.dims() != 3 {
        return bad(format!("workspace must have 3 axes, got {}", g.dims()));
    }
    if !(cfg.loop_radius > 0.0
        && cfg.lane_width > 0.0
        && cfg.agent_length > 0.0
        && cfg.agent_width > 0.0)
    {
        return bad("geometry must be positive".into());
    }
    if !(cfg.agent_speed[0] >= 0.0 && cfg.agent_speed[0] <= cfg.agent_speed[1]) {
        return bad("agent speed range is empty".into());
    }
    if !(cfg.horizon > g.lower()[2] && cfg.horizon <= g.upper()[2]) {
        return bad(format!(
            "horizon {} does not fit the time axis [{}, {}]",
            cfg.horizon,
            g.lower()[2],
            g.upper()[2]
        ));
    }
    if cfg.agent_lateral >= cfg.loop_radius {
        return bad("agent offset exceeds the loop radius".into());
    }
    Ok(())
}

/// Swept box of `agent` over `[t0, t1]`: bounding box of its footprint at
/// both ends, padded by the sagitta of the arc travelled in between.
fn agent_box(agent: &Agent, cfg: &ScenarioConfig, t0: f64, t1: f64) -> AaBox<f64> {
    let f = FootprintSpec {
        length: cfg.agent_length,
        width: cfg.agent_width,
        offset: 0.0,
    };
    let r = cfg.loop_radius + agent.offset;
    let sweep = agent.speed * (t1 - t0) / r;
    let pad = r * (1.0 - (sweep / 2.0).cos());
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for t in [t0, t1] {
        let (a, b) = footprint_polygon(&agent.state(cfg.loop_radius, t), &f).bounding_box();
        for i in 0..2 {
            lo[i] = lo[i].min(a[i] - pad);
            hi[i] = hi[i].max(b[i] + pad);
        }
    }
    AaBox::new(vec![lo[0], lo[1], t0], vec![hi[0], hi[1], t1])
}

/// Cells not contained in the lane annulus, replicated over every slab.
fn lane_complement(cfg: &ScenarioConfig, g: &GridSpec<f64>) -> Result<OccupancyBitset, BenchError> {
    let inner = cfg.loop_radius - cfg.lane_width / 2.0;
    let outer = cfg.loop_radius + cfg.lane_width / 2.0;
    let mut out = g.empty_bitset()?;
    let (wx, wy) = (g.cell_width(0), g.cell_width(1));
    for i in 0..g.axis_cells(0) {
        let x = [
            g.lower()[0] + wx * i as f64,
            g.lower()[0] + wx * (i + 1) as f64,
        ];
        for j in 0..g.axis_cells(1) {
            let y = [
                g.lower()[1] + wy * j as f64,
                g.lower()[1] + wy * (j + 1) as f64,
            ];
            // nearest and farthest points of the cell from the origin
            let near = |a: [f64; 2]| {
                if a[0] > 0.0 {
                    a[0]
                } else if a[1] < 0.0 {
                    -a[1]
                } else {
                    0.0
                }
            };
            let far = |a: [f64; 2]| a[0].abs().max(a[1].abs());
            let inside = near(x).hypot(near(y)) >= inner && far(x).hypot(far(y)) <= outer;
            if !inside {
                for t in 0..g.axis_cells(2) {
                    out.insert(g.interleave(&[i, j, t]).0);
                }
            }
        }
    }
    Ok(out)
}

fn agents(cfg: &ScenarioConfig, query: u64) -> Vec<Agent> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(query);
    (0..cfg.agent_count)
        .map(|_| Agent {
            phase: rng.random_range(-std::f64::consts::PI..std::f64::consts::PI),
            offset: if cfg.agent_lateral > 0.0 {
                rng.random_range(-cfg.agent_lateral..=cfg.agent_lateral)
            } else {
                0.0
            },
            speed: rng.random_range(cfg.agent_speed[0]..=cfg.agent_speed[1]),
        })
        .collect()
}

/// Proposition volumes for query number `query`; deterministic in
/// `(cfg, query)`.
pub fn generate_scenario(
    cfg: &ScenarioConfig,
    g: &GridSpec<f64>,
    query: u64,
) -> Result<Scenario, BenchError> {
    check(cfg, g)?;
    let mut moving = g.empty_bitset()?;
    let slab = g.cell_width(2);
    let slabs = g
        .axis_cell(2, cfg.horizon - slab * 1e-9)
        .map_or(g.axis_cells(2), |t| t + 1);
    for (k, agent) in agents(cfg, query).iter().enumerate() {
        for t in 0..slabs {
            let t0 = g.lower()[2] + slab * t as f64;
            let b = agent_box(agent, cfg, t0.max(0.0), (t0 + slab).min(cfg.horizon));
            if !(b.lo[0] >= g.lower()[0]
                && b.lo[1] >= g.lower()[1]
                && b.hi[0] <= g.upper()[0]
                && b.hi[1] <= g.upper()[1])
            {
                return Err(BenchError::AgentOutside(k));
            }
            if b.hi[2] > b.lo[2] {
                moving.union_with(&rasterize_box(&b, g)?)?;
            }
        }
    }
    Ok(Scenario {
        moving_vehicle: moving,
        not_nominal_lane: lane_complement(cfg, g)?,
    })
}
