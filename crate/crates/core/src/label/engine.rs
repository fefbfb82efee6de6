use rayon::prelude::*;

use super::{mismatch, ColIndex, CsrBoolMatrix, LabelError};
use crate::ltl::AlphabetSymbol;
use crate::workspace::OccupancyBitset;

/// Number of stored indices a worker tests before checking for a witness.
/// Plays the role of the warp width in a GPU kernel.
pub const SCAN_CHUNK: usize = 32;

/// Dense boolean matrix stored column-major, one packed bit vector per
/// proposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensePropMatrix {
    rows: u64,
    columns: Vec<Vec<u64>>,
}

impl DensePropMatrix {
    pub fn from_bitsets(columns: &[OccupancyBitset]) -> Result<Self, LabelError> {
        let rows = columns.first().map_or(0, OccupancyBitset::len);
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(mismatch(
                format!("{rows} rows"),
                format!("{} rows", c.len()),
            ));
        }
        if columns.len() > 64 {
            return Err(LabelError::TooManyPropositions(columns.len()));
        }
        Ok(DensePropMatrix {
            rows,
            columns: columns.iter().map(|c| c.words().to_vec()).collect(),
        })
    }

    /// Builds from explicit boolean columns of length `rows`.
    pub fn from_bool_columns(rows: u64, columns: &[Vec<bool>]) -> Result<Self, LabelError> {
        if columns.len() > 64 {
            return Err(LabelError::TooManyPropositions(columns.len()));
        }
        let words = rows.div_ceil(64) as usize;
        let mut packed = Vec::with_capacity(columns.len());
        for c in columns {
            if c.len() as u64 != rows {
                return Err(mismatch(
                    format!("{rows} rows"),
                    format!("{} rows", c.len()),
                ));
            }
            let mut w = vec![0u64; words];
            for (k, _) in c.iter().enumerate().filter(|(_, &b)| b) {
                w[k / 64] |= 1 << (k % 64);
            }
            packed.push(w);
        }
        Ok(DensePropMatrix {
            rows,
            columns: packed,
        })
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn props(&self) -> usize {
        self.columns.len()
    }

    pub fn get(&self, k: u64, j: usize) -> bool {
        bit(&self.columns[j], k)
    }

    pub fn column(&self, j: usize) -> &[u64] {
        &self.columns[j]
    }

    /// Fraction of set bits in column `j`.
    pub fn occupancy(&self, j: usize) -> f64 {
        let ones: u64 = self.columns[j].iter().map(|w| w.count_ones() as u64).sum();
        ones as f64 / self.rows as f64
    }

    /// Keeps only column `j`.
    pub fn select(&self, j: usize) -> DensePropMatrix {
        DensePropMatrix {
            rows: self.rows,
            columns: vec![self.columns[j].clone()],
        }
    }
}

#[inline]
fn bit(col: &[u64], k: u64) -> bool {
    col[(k >> 6) as usize] >> (k & 63) & 1 == 1
}

/// Result matrix: row `i` is the set of propositions labeling transition `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMatrix {
    props: usize,
    rows: Vec<u64>,
}

impl LabelMatrix {
    pub fn new(rows: usize, props: usize) -> Result<Self, LabelError> {
        if props > 64 {
            return Err(LabelError::TooManyPropositions(props));
        }
        Ok(LabelMatrix {
            props,
            rows: vec![0; rows],
        })
    }

    pub fn from_masks(props: usize, rows: Vec<u64>) -> Result<Self, LabelError> {
        if props > 64 {
            return Err(LabelError::TooManyPropositions(props));
        }
        let full = if props == 64 {
            u64::MAX
        } else {
            (1u64 << props) - 1
        };
        if rows.iter().any(|&m| m & !full != 0) {
            return Err(LabelError::Format(
                "label mask names a proposition past the column count".into(),
            ));
        }
        Ok(LabelMatrix { props, rows })
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn props(&self) -> usize {
        self.props
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        if value {
            self.rows[i] |= 1 << j;
        } else {
            self.rows[i] &= !(1 << j);
        }
    }

    pub fn symbol(&self, i: usize) -> AlphabetSymbol {
        AlphabetSymbol(self.rows[i])
    }

    pub fn masks(&self) -> &[u64] {
        &self.rows
    }

    /// Number of rows carrying proposition `j`.
    pub fn count(&self, j: usize) -> usize {
        self.rows.iter().filter(|&&m| m >> j & 1 == 1).count()
    }
}

/// Counters gathered during a labeling pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ScanStats {
    /// Stored column indices read across all (row, proposition) pairs.
    pub indices_read: u64,
    /// Pairs that found a witness.
    pub hits: u64,
}

fn scan_chunked<I: ColIndex>(row: &[I], col: &[u64]) -> (bool, u64) {
    let mut read = 0;
    for chunk in row.chunks(SCAN_CHUNK) {
        let mut hit = false;
        for &c in chunk {
            hit |= bit(col, c.to_u64().unwrap());
        }
        read += chunk.len() as u64;
        if hit {
            return (true, read);
        }
    }
    (false, read)
}

/// Tests one (row, proposition) pair sequentially and reports how many
/// stored indices were examined: the position of the first witness plus
/// one, or the row length when there is none.
pub fn label_edge_counting<I: ColIndex>(row: &[I], col: &[u64]) -> (bool, u64) {
    match row.iter().position(|&c| bit(col, c.to_u64().unwrap())) {
        Some(k) => (true, k as u64 + 1),
        None => (false, row.len() as u64),
    }
}

fn check_shapes<I: ColIndex>(m: &CsrBoolMatrix<I>, p: &DensePropMatrix) -> Result<(), LabelError> {
    if m.cols() != p.rows() {
        return Err(mismatch(
            format!("M is {}x{}", m.rows(), m.cols()),
            format!("P is {}x{}", p.rows(), p.props()),
        ));
    }
    Ok(())
}

fn label_row<I: ColIndex>(row: &[I], p: &DensePropMatrix) -> (u64, ScanStats) {
    let mut mask = 0;
    let mut stats = ScanStats::default();
    for j in 0..p.props() {
        let (hit, read) = scan_chunked(row, p.column(j));
        stats.indices_read += read;
        if hit {
            mask |= 1 << j;
            stats.hits += 1;
        }
    }
    (mask, stats)
}

fn label_rows<I: ColIndex>(m: &CsrBoolMatrix<I>, p: &DensePropMatrix) -> (LabelMatrix, ScanStats) {
    let results: Vec<(u64, ScanStats)> = (0..m.rows())
        .into_par_iter()
        .with_min_len(64)
        .map(|i| label_row(m.row(i), p))
        .collect();
    let mut stats = ScanStats::default();
    let rows = results
        .into_iter()
        .map(|(mask, s)| {
            stats.indices_read += s.indices_read;
            stats.hits += s.hits;
            mask
        })
        .collect();
    (
        LabelMatrix {
            props: p.props(),
            rows,
        },
        stats,
    )
}

/// Computes `L(i, j) = OR_k M(i, k) AND P(k, j)` on the global thread pool.
pub fn label_all<I: ColIndex>(
    m: &CsrBoolMatrix<I>,
    p: &DensePropMatrix,
) -> Result<LabelMatrix, LabelError> {
    check_shapes(m, p)?;
    Ok(label_rows(m, p).0)
}

/// Labeling with a configurable worker count.
pub struct LabelEngine {
    pool: Option<rayon::ThreadPool>,
}

impl LabelEngine {
    /// `None` uses the global pool.
    pub fn new(workers: Option<usize>) -> Result<Self, LabelError> {
        let pool = match workers {
            None => None,
            Some(n) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| LabelError::Io(std::io::Error::other(e)))?,
            ),
        };
        Ok(LabelEngine { pool })
    }

    pub fn label_all<I: ColIndex>(
        &self,
        m: &CsrBoolMatrix<I>,
        p: &DensePropMatrix,
    ) -> Result<LabelMatrix, LabelError> {
        Ok(self.label_with_stats(m, p)?.0)
    }

    pub fn label_with_stats<I: ColIndex>(
        &self,
        m: &CsrBoolMatrix<I>,
        p: &DensePropMatrix,
    ) -> Result<(LabelMatrix, ScanStats), LabelError> {
        check_shapes(m, p)?;
        Ok(match &self.pool {
            Some(pool) => pool.install(|| label_rows(m, p)),
            None => label_rows(m, p),
        })
    }
}
