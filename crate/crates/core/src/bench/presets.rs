use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::BenchError;
use crate::abstraction::{
    build_abstraction, AbstractionConfig, FootprintSpec, State5, TargetSampling, VehicleParams,
};
use crate::label::CsrBoolMatrix;
use crate::workspace::{GridSpec, WorkspaceError};

/// Transition counts of the reference system sizes.
pub const REFERENCE_SIZES: [usize; 5] = [154_776, 295_700, 568_958, 836_276, 1_097_702];

/// The time-augmented workspace of the loop scenario: 64 m x 64 m
/// centered on the loop, 8 s of time.
pub fn bench_grid(depth: u32) -> Result<GridSpec<f64>, WorkspaceError> {
    GridSpec::new(&[(-32.0, 32.0), (-32.0, 32.0), (0.0, 8.0)], depth)
}

/// A lane-following roadmap around the default loop with exactly
/// `edges` transitions (if the construction reaches that many).
pub fn bench_abstraction_config(edges: usize) -> AbstractionConfig<f64> {
    let radius = 22.0;
    AbstractionConfig {
        initial: State5::new(radius, 0.0, std::f64::consts::FRAC_PI_2, 8.0, 0.0),
        x_range: [-32.0, 32.0],
        y_range: [-32.0, 32.0],
        speed_range: [2.0, 14.0],
        horizon: 8.0,
        vertex_count: edges.max(1),
        neighbors: 4,
        steer_levels: vec![-0.05, 0.0, 0.06, 0.12, 0.18, 0.25],
        accel_levels: vec![-1.5, 0.0, 1.5],
        primitive_duration: 0.5,
        step: 0.01,
        vehicle: VehicleParams::default(),
        eps_end: 1e-3,
        target_edges: Some(edges),
        sampling: TargetSampling::Loop {
            center: [0.0, 0.0],
            radius,
            lateral: 1.5,
            lookahead: 5.0,
            corridor: 3.5,
        },
    }
}

/// Swept-volume matrices with `sizes[i]` rows each. The largest size is a
/// full roadmap built with `seed`; every smaller size is a uniform random
/// subset of its transitions, so all sizes share one mix of motions.
pub fn preset_matrices(
    sizes: &[usize],
    seed: u64,
    footprint: &FootprintSpec<f64>,
    grid: &GridSpec<f64>,
) -> Result<Vec<CsrBoolMatrix<u32>>, BenchError> {
    let Some(&largest) = sizes.iter().max() else {
        return Ok(Vec::new());
    };
    let sys = build_abstraction(&bench_abstraction_config(largest), seed)?;
    if sys.edge_count() < largest {
        return Err(BenchError::Scenario(format!(
            "roadmap stopped at {} of {largest} transitions",
            sys.edge_count()
        )));
    }
    let full = sys.swept_volumes::<u32>(footprint, grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sizes
        .iter()
        .map(|&n| {
            if n == largest {
                return Ok(full.clone());
            }
            let mut rows = rand::seq::index::sample(&mut rng, largest, n).into_vec();
            rows.sort_unstable();
            Ok(full.select_rows(&rows)?)
        })
        .collect()
}
