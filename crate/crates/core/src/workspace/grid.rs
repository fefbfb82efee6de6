use serde::{Deserialize, Serialize};

use super::{OccupancyBitset, WorkspaceError};
use crate::Real;

/// Position of a cell along the z-order curve, in `[0, 2^d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ZIndex(pub u64);

/// `[l_1,u_1] × … × [l_k,u_k]` split into `2^d` cells.
///
/// Axis `i` receives `d / k` bits, plus one extra for the first `d % k`
/// axes. Index bits are interleaved round-robin starting at axis 0 in the
/// most significant position.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<T> {
    lower: Vec<T>,
    upper: Vec<T>,
    depth: u32,
    bits: Vec<u32>,
    // spread[axis][q] = index bits contributed by axis coordinate q
    spread: Vec<Vec<u64>>,
}

const SPREAD_TABLE_MAX_BITS: u32 = 20;

/// Serialized form of a grid: per-axis `[lower, upper]` and total depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDocument {
    pub bounds: Vec<[f64; 2]>,
    pub depth: u32,
}

impl<T: Real> GridSpec<T> {
    pub fn new(bounds: &[(T, T)], depth: u32) -> Result<Self, WorkspaceError> {
        let k = bounds.len();
        if k == 0 {
            return Err(WorkspaceError::InvalidGrid("no axes".into()));
        }
        if depth > 63 {
            return Err(WorkspaceError::InvalidGrid(format!(
                "depth {depth} exceeds 63"
            )));
        }
        for (i, &(l, u)) in bounds.iter().enumerate() {
            if !(l < u) || !l.is_finite() || !u.is_finite() {
                return Err(WorkspaceError::InvalidGrid(format!(
                    "axis {i} has empty or non-finite range"
                )));
            }
        }
        let bits: Vec<u32> = (0..k as u32)
            .map(|i| depth / k as u32 + u32::from(i < depth % k as u32))
            .collect();
        let mut g = GridSpec {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
            depth,
            bits,
            spread: Vec::new(),
        };
        if g.bits.iter().all(|&b| b <= SPREAD_TABLE_MAX_BITS) {
            g.spread = (0..k)
                .map(|axis| {
                    (0..1u64 << g.bits[axis])
                        .map(|q| g.spread_slow(axis, q))
                        .collect()
                })
                .collect();
        }
        Ok(g)
    }

    pub fn from_document(doc: &GridDocument) -> Result<Self, WorkspaceError> {
        let bounds: Vec<(T, T)> = doc
            .bounds
            .iter()
            .map(|b| (T::lit(b[0]), T::lit(b[1])))
            .collect();
        Self::new(&bounds, doc.depth)
    }

    pub fn to_document(&self) -> GridDocument {
        GridDocument {
            bounds: self
                .lower
                .iter()
                .zip(&self.upper)
                .map(|(l, u)| [l.as_f64(), u.as_f64()])
                .collect(),
            depth: self.depth,
        }
    }

    pub fn dims(&self) -> usize {
        self.lower.len()
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn axis_bits(&self, axis: usize) -> u32 {
        self.bits[axis]
    }

    /// Number of cells along `axis`.
    pub fn axis_cells(&self, axis: usize) -> u64 {
        1 << self.bits[axis]
    }

    pub fn cell_count(&self) -> u64 {
        1 << self.depth
    }

    pub fn lower(&self) -> &[T] {
        &self.lower
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    pub fn cell_width(&self, axis: usize) -> T {
        (self.upper[axis] - self.lower[axis]) / T::lit(self.axis_cells(axis) as f64)
    }

    pub fn empty_bitset(&self) -> Result<OccupancyBitset, WorkspaceError> {
        OccupancyBitset::empty(self.dims() as u32, self.depth)
    }

    pub fn full_bitset(&self) -> Result<OccupancyBitset, WorkspaceError> {
        OccupancyBitset::full(self.dims() as u32, self.depth)
    }

    fn spread_slow(&self, axis: usize, q: u64) -> u64 {
        let k = self.dims();
        let d = self.depth as usize;
        let b = self.bits[axis] as usize;
        let mut out = 0;
        // level ℓ holds bit (b - 1 - ℓ/k) of axis ℓ % k at index position d-1-ℓ
        for r in 0..b {
            let level = r * k + axis;
            if q >> (b - 1 - r) & 1 == 1 {
                out |= 1 << (d - 1 - level);
            }
        }
        out
    }

    /// Interleaves per-axis cell coordinates into a z-order index.
    pub fn interleave(&self, coords: &[u64]) -> ZIndex {
        debug_assert_eq!(coords.len(), self.dims());
        let mut z = 0;
        if self.spread.is_empty() {
            for (axis, &q) in coords.iter().enumerate() {
                z |= self.spread_slow(axis, q);
            }
        } else {
            for (axis, &q) in coords.iter().enumerate() {
                z |= self.spread[axis][q as usize];
            }
        }
        ZIndex(z)
    }

    /// Inverse of [`GridSpec::interleave`].
    pub fn deinterleave(&self, z: ZIndex) -> Vec<u64> {
        let k = self.dims();
        let d = self.depth as usize;
        let mut coords = vec![0u64; k];
        for level in 0..d {
            let bit = z.0 >> (d - 1 - level) & 1;
            let axis = level % k;
            coords[axis] = coords[axis] << 1 | bit;
        }
        coords
    }

    /// Normalized coordinate in `[0, 1)` along `axis`, or `None` outside.
    fn normalized(&self, axis: usize, x: T) -> Option<T> {
        if !(x >= self.lower[axis] && x < self.upper[axis]) {
            return None;
        }
        Some((x - self.lower[axis]) / (self.upper[axis] - self.lower[axis]))
    }

    /// Cell coordinate along `axis` containing `x`.
    pub fn axis_cell(&self, axis: usize, x: T) -> Option<u64> {
        let z = self.normalized(axis, x)?;
        let n = self.axis_cells(axis);
        let q = (z * T::lit(n as f64)).floor().to_u64().unwrap_or(0);
        Some(q.min(n - 1))
    }

    fn check_point(&self, p: &[T]) -> Result<(), WorkspaceError> {
        if p.len() != self.dims() {
            return Err(WorkspaceError::DimensionMismatch {
                expected: self.dims(),
                got: p.len(),
            });
        }
        Ok(())
    }

    fn out_of_bounds(p: &[T]) -> WorkspaceError {
        WorkspaceError::OutOfBounds(p.iter().map(|x| x.as_f64()).collect())
    }

    /// Inclusive range of cells along `axis` overlapping `(lo, hi)` with
    /// positive length. Touching faces do not count.
    pub fn axis_overlap(&self, axis: usize, lo: T, hi: T) -> Option<(u64, u64)> {
        let n = self.axis_cells(axis);
        let scale = T::lit(n as f64) / (self.upper[axis] - self.lower[axis]);
        let a = (lo - self.lower[axis]) * scale;
        let c = (hi - self.lower[axis]) * scale;
        if !(c > a) || c <= T::zero() || a >= T::lit(n as f64) {
            return None;
        }
        let first = if a <= T::zero() {
            0
        } else {
            a.floor().to_u64()?
        };
        let last = (c.ceil().to_u64()?).min(n).saturating_sub(1);
        (first <= last).then_some((first, last))
    }
}

/// Cell index of `p` by bit interleaving of quantized coordinates.
pub fn z_index<T: Real>(p: &[T], g: &GridSpec<T>) -> Result<ZIndex, WorkspaceError> {
    g.check_point(p)?;
    let coords = p
        .iter()
        .enumerate()
        .map(|(axis, &x)| g.axis_cell(axis, x))
        .collect::<Option<Vec<u64>>>()
        .ok_or_else(|| GridSpec::out_of_bounds(p))?;
    Ok(g.interleave(&coords))
}

/// Cell index of `p` by descending the space-partitioning binary tree:
/// at depth `i` the splitting plane is normal to axis `i mod k`, and a
/// point at or above the pivot adds `2^(d-1-i)` and moves the pivot up.
pub fn z_index_tree_descent<T: Real>(p: &[T], g: &GridSpec<T>) -> Result<ZIndex, WorkspaceError> {
    g.check_point(p)?;
    let k = g.dims();
    let z = p
        .iter()
        .enumerate()
        .map(|(axis, &x)| g.normalized(axis, x))
        .collect::<Option<Vec<T>>>()
        .ok_or_else(|| GridSpec::out_of_bounds(p))?;
    let half = T::lit(0.5);
    let mut pivot = vec![half; k];
    let mut step = vec![half * half; k];
    let mut n = 0u64;
    let d = g.depth();
    for level in 0..d {
        let j = level as usize % k;
        if z[j] >= pivot[j] {
            n += 1 << (d - 1 - level);
            pivot[j] = pivot[j] + step[j];
        } else {
            pivot[j] = pivot[j] - step[j];
        }
        step[j] = step[j] * half;
    }
    Ok(ZIndex(n))
}

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AaBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Real> AaBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Self {
        AaBox { lo, hi }
    }

    pub fn center(&self) -> Vec<T> {
        let two = T::lit(2.0);
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| (l + h) / two)
            .collect()
    }

    pub fn volume(&self) -> T {
        self.lo
            .iter()
            .zip(&self.hi)
            .fold(T::one(), |v, (&l, &h)| v * (h - l))
    }

    /// Whether the boxes share a region of positive volume.
    pub fn overlaps(&self, other: &AaBox<T>) -> bool {
        (0..self.lo.len()).all(|i| self.lo[i] < other.hi[i] && other.lo[i] < self.hi[i])
    }
}

/// The cell box of index `i`.
pub fn cell_bounds<T: Real>(i: ZIndex, g: &GridSpec<T>) -> Result<AaBox<T>, WorkspaceError> {
    if i.0 >= g.cell_count() {
        return Err(WorkspaceError::IndexOutOfRange(i.0));
    }
    let coords = g.deinterleave(i);
    let mut lo = Vec::with_capacity(g.dims());
    let mut hi = Vec::with_capacity(g.dims());
    for (axis, &q) in coords.iter().enumerate() {
        let w = g.cell_width(axis);
        lo.push(g.lower[axis] + w * T::lit(q as f64));
        hi.push(if q + 1 == g.axis_cells(axis) {
            g.upper[axis]
        } else {
            g.lower[axis] + w * T::lit((q + 1) as f64)
        });
    }
    Ok(AaBox { lo, hi })
}

/// Cells whose boxes overlap `b` with positive volume.
pub fn rasterize_box<T: Real>(
    b: &AaBox<T>,
    g: &GridSpec<T>,
) -> Result<OccupancyBitset, WorkspaceError> {
    let mut out = g.empty_bitset()?;
    let ranges = box_ranges(b, g)?;
    for_each_cell(&ranges, g, |z| out.insert(z.0));
    Ok(out)
}

pub(crate) fn box_ranges<T: Real>(
    b: &AaBox<T>,
    g: &GridSpec<T>,
) -> Result<Vec<(u64, u64)>, WorkspaceError> {
    if b.lo.len() != g.dims() || b.hi.len() != g.dims() {
        return Err(WorkspaceError::DimensionMismatch {
            expected: g.dims(),
            got: b.lo.len(),
        });
    }
    (0..g.dims())
        .map(|axis| g.axis_overlap(axis, b.lo[axis], b.hi[axis]))
        .collect::<Option<Vec<_>>>()
        .ok_or(WorkspaceError::BoxOutside)
}

/// Visits every cell in the product of inclusive per-axis ranges.
pub(crate) fn for_each_cell<T: Real>(
    ranges: &[(u64, u64)],
    g: &GridSpec<T>,
    mut f: impl FnMut(ZIndex),
) {
    let mut q: Vec<u64> = ranges.iter().map(|r| r.0).collect();
    loop {
        f(g.interleave(&q));
        let mut axis = 0;
        loop {
            if axis == q.len() {
                return;
            }
            if q[axis] < ranges[axis].1 {
                q[axis] += 1;
                break;
            }
            q[axis] = ranges[axis].0;
            axis += 1;
        }
    }
}
