use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{generate_scenario, BenchError, ScenarioConfig, MOVING_VEHICLE, NOT_NOMINAL_LANE};
use crate::abstraction::{FootprintSpec, TransitionSystem};
use crate::label::{CsrBoolMatrix, DensePropMatrix, LabelEngine};
use crate::workspace::GridSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BenchConfig {
    pub queries: usize,
    /// Worker threads for labeling; `None` uses every core.
    pub workers: Option<usize>,
    /// Untimed labeling calls before measurement.
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            queries: 150,
            workers: None,
            warmup: 1,
        }
    }
}

/// Timing statistics of one (system size, proposition) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub size: usize,
    pub proposition: String,
    pub mean_ms: f64,
    pub var_ms: f64,
    /// Mean fraction of the workspace swept by one transition.
    pub occupancy_transition: f64,
    /// Mean fraction of the workspace occupied by the proposition.
    pub occupancy_prop: f64,
    /// Transition-proposition pairs labeled per second.
    pub throughput: f64,
    pub queries: usize,
    /// Stored indices read per call, averaged over queries.
    pub mean_indices_read: f64,
    /// Rough bytes touched per second: each index read loads the index and
    /// one 64-bit word of the proposition column. Not comparable to device
    /// memory bandwidth figures.
    pub est_bytes_per_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub wall_s: f64,
}

impl BenchReport {
    pub fn row(&self, size: usize, proposition: &str) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.size == size && r.proposition == proposition)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.rows.iter().map(|r| r.size).collect();
        s.dedup();
        s
    }

    pub const CSV_HEADER: &'static str =
        "size,proposition,mean_ms,var_ms,occupancy_transition,occupancy_prop,throughput";

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", Self::CSV_HEADER)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{:.6},{:.6},{:.6e},{:.6},{:.6e}",
                r.size,
                r.proposition,
                r.mean_ms,
                r.var_ms,
                r.occupancy_transition,
                r.occupancy_prop,
                r.throughput
            )?;
        }
        Ok(())
    }
}

/// Least-squares line `y = slope * x + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// `|fit - y| / y` per point.
    pub relative_residuals: Vec<f64>,
}

impl LinearFit {
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self, BenchError> {
        if points.len() < 3 {
            return Err(BenchError::InsufficientPoints {
                needed: 3,
                got: points.len(),
            });
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        if sxx == 0.0 {
            return Err(BenchError::InsufficientPoints { needed: 2, got: 1 });
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let relative_residuals = points
            .iter()
            .map(|&(x, y)| ((slope * x + intercept) - y).abs() / y.abs())
            .collect();
        Ok(LinearFit {
            slope,
            intercept,
            relative_residuals,
        })
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.relative_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Fits mean labeling time against transition count for one proposition.
pub fn fit_scaling(report: &BenchReport, proposition: &str) -> Result<LinearFit, BenchError> {
    let pts: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.proposition == proposition)
        .map(|r| (r.size as f64, r.mean_ms))
        .collect();
    LinearFit::from_points(&pts)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = if xs.len() > 1 {
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, v)
}

/// Times labeling of every swept-volume matrix against `queries` freshly
/// generated scenarios, one proposition at a time.
pub fn run_benchmark_matrices(
    matrices: &[CsrBoolMatrix<u32>],
    scenario: &ScenarioConfig,
    grid: &GridSpec<f64>,
    cfg: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    let started = Instant::now();
    if cfg.queries == 0 {
        return Err(BenchError::Scenario(
            "at least one query is required".into(),
        ));
    }
    for m in matrices {
        if m.cols() != grid.cell_count() {
            return Err(BenchError::Mismatch(format!(
                "{} columns vs {} cells",
                m.cols(),
                grid.cell_count()
            )));
        }
    }
    let engine = LabelEngine::new(cfg.workers)?;
    let names = [MOVING_VEHICLE, NOT_NOMINAL_LANE];
    let columns: Vec<[DensePropMatrix; 2]> = (0..cfg.queries as u64)
        .into_par_iter()
        .map(|q| {
            let s = generate_scenario(scenario, grid, q)?;
            Ok([
                DensePropMatrix::from_bitsets(std::slice::from_ref(&s.moving_vehicle))?,
                DensePropMatrix::from_bitsets(std::slice::from_ref(&s.not_nominal_lane))?,
            ])
        })
        .collect::<Result<_, BenchError>>()?;
    let mut rows = Vec::new();
    for m in matrices {
        let occupancy_transition = m.density();
        for (j, name) in names.iter().enumerate() {
            for _ in 0..cfg.warmup {
                engine.label_all(m, &columns[0][j])?;
            }
            let mut times = Vec::with_capacity(cfg.queries);
            let mut reads = 0u64;
            for c in &columns {
                let t = Instant::now();
                let (_, stats) = engine.label_with_stats(m, &c[j])?;
                times.push(t.elapsed().as_secs_f64() * 1e3);
                reads += stats.indices_read;
            }
            let (mean_ms, var_ms) = mean_var(&times);
            let occupancy_prop =
                columns.iter().map(|c| c[j].occupancy(0)).sum::<f64>() / cfg.queries as f64;
            let mean_indices_read = reads as f64 / cfg.queries as f64;
            rows.push(BenchRow {
                size: m.rows(),
                proposition: name.to_string(),
                mean_ms,
                var_ms,
                occupancy_transition,
                occupancy_prop,
                throughput: m.rows() as f64 / (mean_ms / 1e3),
                queries: cfg.queries,
                mean_indices_read,
                est_bytes_per_s: mean_indices_read * (std::mem::size_of::<u32>() + 8) as f64
                    / (mean_ms / 1e3),
            });
        }
    }
    Ok(BenchReport {
        rows,
        wall_s: started.elapsed().as_secs_f64(),
    })
}

/// Sweeps every preset into the grid, then runs [`run_benchmark_matrices`].
pub fn run_benchmark(
    presets: &[TransitionSystem<f64>],
    footprint: &FootprintSpec<f64>,
    scenario: &ScenarioConfig,
    grid: &GridSpec<f64>,
    cfg: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    let matrices = presets
        .iter()
        .map(|p| {
            p.swept_volumes::<u32>(footprint, grid)
                .map_err(|e| BenchError::Mismatch(e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    run_benchmark_matrices(&matrices, scenario, grid, cfg)
}
