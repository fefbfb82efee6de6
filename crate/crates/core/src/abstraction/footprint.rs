use serde::{Deserialize, Serialize};

use super::{AbstractionError, State5, Trajectory};
use crate::workspace::{GridSpec, OccupancyBitset};
use crate::Real;

/// Rectangular vehicle outline. The rectangle center sits `offset` metres
/// ahead of the reference point along the heading.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FootprintSpec<T> {
    pub length: T,
    pub width: T,
    pub offset: T,
}

impl<T: Real> Default for FootprintSpec<T> {
    fn default() -> Self {
        FootprintSpec {
            length: T::lit(4.5),
            width: T::lit(1.8),
            offset: T::lit(-1.35),
        }
    }
}

impl<T: Real> FootprintSpec<T> {
    pub fn new(length: T, width: T, offset: T) -> Result<Self, AbstractionError> {
        if !(length > T::zero() && width > T::zero()) {
            return Err(AbstractionError::Footprint(format!(
                "dimensions must be positive, got {} x {}",
                length.as_f64(),
                width.as_f64()
            )));
        }
        Ok(FootprintSpec {
            length,
            width,
            offset,
        })
    }
}

/// Rectangle in the plane with half extents along its own axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect<T> {
    pub center: [T; 2],
    pub half: [T; 2],
    pub angle: T,
}

impl<T: Real> OrientedRect<T> {
    /// Unit vectors of the rectangle's length and width directions.
    pub fn axes(&self) -> [[T; 2]; 2] {
        let (s, c) = self.angle.sin_cos();
        [[c, s], [-s, c]]
    }

    /// Corners counterclockwise, starting front-left.
    pub fn corners(&self) -> [[T; 2]; 4] {
        let [u, w] = self.axes();
        let [a, b] = self.half;
        let [cx, cy] = self.center;
        let at = |i: T, j: T| {
            [
                cx + i * a * u[0] + j * b * w[0],
                cy + i * a * u[1] + j * b * w[1],
            ]
        };
        let one = T::one();
        [at(one, one), at(-one, one), at(-one, -one), at(one, -one)]
    }

    /// `([xmin, ymin], [xmax, ymax])`.
    pub fn bounding_box(&self) -> ([T; 2], [T; 2]) {
        let [u, w] = self.axes();
        let [a, b] = self.half;
        let ex = a * u[0].abs() + b * w[0].abs();
        let ey = a * u[1].abs() + b * w[1].abs();
        (
            [self.center[0] - ex, self.center[1] - ey],
            [self.center[0] + ex, self.center[1] + ey],
        )
    }

    /// Whether the rectangle and the axis-aligned box `[lo, hi]` share a
    /// region of positive area (separating axis test).
    pub fn overlaps_box(&self, lo: [T; 2], hi: [T; 2]) -> bool {
        let two = T::lit(2.0);
        let bc = [(lo[0] + hi[0]) / two, (lo[1] + hi[1]) / two];
        let bh = [(hi[0] - lo[0]) / two, (hi[1] - lo[1]) / two];
        let d = [self.center[0] - bc[0], self.center[1] - bc[1]];
        let (rlo, rhi) = self.bounding_box();
        if !(rlo[0] < hi[0] && lo[0] < rhi[0] && rlo[1] < hi[1] && lo[1] < rhi[1]) {
            return false;
        }
        for (axis, r_rect) in self.axes().into_iter().zip(self.half) {
            let dist = (d[0] * axis[0] + d[1] * axis[1]).abs();
            let r_box = bh[0] * axis[0].abs() + bh[1] * axis[1].abs();
            if dist >= r_box + r_rect {
                return false;
            }
        }
        true
    }
}

/// The footprint rectangle of the vehicle in state `x`.
pub fn footprint_polygon<T: Real>(x: &State5<T>, f: &FootprintSpec<T>) -> OrientedRect<T> {
    let (s, c) = x.theta.sin_cos();
    let two = T::lit(2.0);
    OrientedRect {
        center: [x.x + f.offset * c, x.y + f.offset * s],
        half: [f.length / two, f.width / two],
        angle: x.theta,
    }
}

fn check_grid<T: Real>(g: &GridSpec<T>) -> Result<(), AbstractionError> {
    if g.dims() != 3 {
        return Err(AbstractionError::GridDims(g.dims()));
    }
    Ok(())
}

/// `[min, max]` of x over the part of `rect` with `y` in `[y0, y1]`.
fn strip_extent<T: Real>(corners: &[[T; 2]; 4], y0: T, y1: T) -> Option<(T, T)> {
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    let mut take = |x: T| {
        lo = lo.min(x);
        hi = hi.max(x);
    };
    for k in 0..4 {
        let [ax, ay] = corners[k];
        let [bx, by] = corners[(k + 1) % 4];
        if ay >= y0 && ay <= y1 {
            take(ax);
        }
        if ay != by {
            for yb in [y0, y1] {
                if (ay - yb) * (by - yb) <= T::zero() {
                    take(ax + (bx - ax) * (yb - ay) / (by - ay));
                }
            }
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Appends `(t, row, first, last)` cell runs of slab `t` overlapped by
/// `rect` with positive area. Each row of cells is intersected with the
/// rectangle's exact x-extent inside that row; for a convex shape every
/// column strictly inside the extent meets its interior.
fn rect_runs<T: Real>(
    rect: &OrientedRect<T>,
    t: u64,
    g: &GridSpec<T>,
    out: &mut Vec<(u64, u64, u64, u64)>,
) {
    let (lo, hi) = rect.bounding_box();
    let Some(yr) = g.axis_overlap(1, lo[1], hi[1]) else {
        return;
    };
    let corners = rect.corners();
    let wy = g.cell_width(1);
    let y0 = g.lower()[1];
    for j in yr.0..=yr.1 {
        let (a, b) = (y0 + wy * T::lit(j as f64), y0 + wy * T::lit((j + 1) as f64));
        let Some((xa, xb)) = strip_extent(&corners, a, b) else {
            continue;
        };
        if let Some((i0, i1)) = g.axis_overlap(0, xa, xb) {
            out.push((t, j, i0, i1));
        }
    }
}

/// Expands runs into sorted, distinct cell indices, merging overlapping
/// runs of the same slab and row first.
fn runs_to_cells<T: Real>(mut runs: Vec<(u64, u64, u64, u64)>, g: &GridSpec<T>) -> Vec<u64> {
    runs.sort_unstable();
    let mut out = Vec::new();
    let mut k = 0;
    while k < runs.len() {
        let (t, j, i0, mut i1) = runs[k];
        k += 1;
        while k < runs.len() && runs[k].0 == t && runs[k].1 == j && runs[k].2 <= i1 + 1 {
            i1 = i1.max(runs[k].3);
            k += 1;
        }
        out.extend((i0..=i1).map(|i| g.interleave(&[i, j, t]).0));
    }
    out.sort_unstable();
    out
}

/// Sorted cell indices of the swept volume: each sample's footprint is
/// rasterized into the time slab containing its `tau`.
pub fn sweep_cells<T: Real>(
    tr: &Trajectory<T>,
    f: &FootprintSpec<T>,
    g: &GridSpec<T>,
) -> Result<Vec<u64>, AbstractionError> {
    check_grid(g)?;
    let mut runs = Vec::new();
    for s in tr.samples() {
        let inside = g.axis_cell(0, s.x).is_some() && g.axis_cell(1, s.y).is_some();
        let t = g
            .axis_cell(2, s.tau)
            .filter(|_| inside)
            .ok_or_else(|| AbstractionError::ExitsWorkspace(s.to_array()))?;
        rect_runs(&footprint_polygon(s, f), t, g, &mut runs);
    }
    Ok(runs_to_cells(runs, g))
}

/// [`sweep_cells`] as a dense bitset.
pub fn sweep_voxelize<T: Real>(
    tr: &Trajectory<T>,
    f: &FootprintSpec<T>,
    g: &GridSpec<T>,
) -> Result<OccupancyBitset, AbstractionError> {
    let cells = sweep_cells(tr, f, g)?;
    Ok(OccupancyBitset::from_indices(3, g.depth(), cells)?)
}
