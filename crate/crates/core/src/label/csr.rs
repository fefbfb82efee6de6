use std::fmt::Debug;

use num_traits::{PrimInt, Unsigned};

use super::LabelError;
use crate::workspace::OccupancyBitset;

/// Unsigned integer type used for stored column indices.
pub trait ColIndex: PrimInt + Unsigned + Debug + Send + Sync + 'static {}

impl ColIndex for u32 {}
impl ColIndex for u64 {}

/// Boolean matrix in compressed sparse row form.
///
/// Row `i` holds the ascending column indices
/// `col_indices[row_offsets[i]..row_offsets[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrBoolMatrix<I = u32> {
    cols: u64,
    row_offsets: Vec<usize>,
    col_indices: Vec<I>,
}

impl<I: ColIndex> CsrBoolMatrix<I> {
    pub fn from_parts(
        cols: u64,
        row_offsets: Vec<usize>,
        col_indices: Vec<I>,
    ) -> Result<Self, LabelError> {
        let bad = |m: &str| Err(LabelError::MalformedCsr(m.to_string()));
        if row_offsets.first() != Some(&0) {
            return bad("row offsets must start at 0");
        }
        if *row_offsets.last().unwrap() != col_indices.len() {
            return bad("last row offset must equal the number of stored entries");
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return bad("row offsets must be nondecreasing");
        }
        for w in row_offsets.windows(2) {
            let row = &col_indices[w[0]..w[1]];
            if row.windows(2).any(|p| p[0] >= p[1]) {
                return bad("column indices within a row must be strictly ascending");
            }
            if row.last().is_some_and(|&c| c.to_u64().unwrap() >= cols) {
                return bad("column index out of range");
            }
        }
        Ok(CsrBoolMatrix {
            cols,
            row_offsets,
            col_indices,
        })
    }

    /// Builds from rows given as ascending column lists.
    pub fn from_sorted_rows<R, It>(cols: u64, rows: R) -> Result<Self, LabelError>
    where
        R: IntoIterator<Item = It>,
        It: IntoIterator<Item = u64>,
    {
        let mut row_offsets = vec![0];
        let mut col_indices = Vec::new();
        for row in rows {
            for c in row {
                col_indices.push(I::from(c).ok_or(LabelError::IndexOverflow(c))?);
            }
            row_offsets.push(col_indices.len());
        }
        Self::from_parts(cols, row_offsets, col_indices)
    }

    /// The matrix made of the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self, LabelError> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows()) {
            return Err(super::mismatch(
                format!("row {r}"),
                format!("{} rows", self.rows()),
            ));
        }
        let mut row_offsets = Vec::with_capacity(rows.len() + 1);
        row_offsets.push(0);
        let mut col_indices = Vec::new();
        for &r in rows {
            col_indices.extend_from_slice(self.row(r));
            row_offsets.push(col_indices.len());
        }
        Ok(CsrBoolMatrix {
            cols: self.cols,
            row_offsets,
            col_indices,
        })
    }

    /// Builds from dense boolean rows of equal length.
    pub fn from_dense(rows: &[Vec<bool>]) -> Result<Self, LabelError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(LabelError::MalformedCsr("ragged dense rows".into()));
        }
        Self::from_sorted_rows(
            cols as u64,
            rows.iter().map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(c, _)| c as u64)
            }),
        )
    }

    pub fn rows(&self) -> usize {
        self.row_offsets.len() - 1
    }

    pub fn cols(&self) -> u64 {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.col_indices.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[I] {
        &self.col_indices
    }

    pub fn row(&self, i: usize) -> &[I] {
        &self.col_indices[self.row_offsets[i]..self.row_offsets[i + 1]]
    }

    /// Reconstructs row `i` as a bitset of the given grid shape.
    pub fn row_bitset(
        &self,
        i: usize,
        dims: u32,
        depth: u32,
    ) -> Result<OccupancyBitset, LabelError> {
        if 1u64.checked_shl(depth) != Some(self.cols) {
            return Err(super::mismatch(
                format!("{} columns", self.cols),
                format!("depth {depth}"),
            ));
        }
        Ok(OccupancyBitset::from_indices(
            dims,
            depth,
            self.row(i).iter().map(|c| c.to_u64().unwrap()),
        )?)
    }

    /// Ratio of stored entries to matrix size.
    pub fn density(&self) -> f64 {
        if self.rows() == 0 || self.cols == 0 {
            return 0.0;
        }
        self.nnz() as f64 / (self.rows() as f64 * self.cols as f64)
    }

    /// Median gap between consecutive stored columns over all rows, a
    /// measure of how clustered each row's entries are.
    pub fn median_gap(&self) -> Option<u64> {
        let mut gaps: Vec<u64> = (0..self.rows())
            .flat_map(|i| {
                self.row(i)
                    .windows(2)
                    .map(|w| (w[1] - w[0]).to_u64().unwrap())
                    .collect::<Vec<_>>()
            })
            .collect();
        if gaps.is_empty() {
            return None;
        }
        let mid = gaps.len() / 2;
        Some(*gaps.select_nth_unstable(mid).1)
    }
}

/// Packs equally shaped bitsets as CSR rows. Lossless.
pub fn to_csr<I: ColIndex>(rows: &[OccupancyBitset]) -> Result<CsrBoolMatrix<I>, LabelError> {
    let Some(first) = rows.first() else {
        return CsrBoolMatrix::from_parts(0, vec![0], Vec::new());
    };
    if let Some(r) = rows
        .iter()
        .find(|r| (r.dims(), r.depth()) != (first.dims(), first.depth()))
    {
        return Err(super::mismatch(
            format!("grid (k={}, d={})", first.dims(), first.depth()),
            format!("grid (k={}, d={})", r.dims(), r.depth()),
        ));
    }
    CsrBoolMatrix::from_sorted_rows(first.len(), rows.iter().map(|r| r.iter_ones()))
}

impl<I: ColIndex> CsrBoolMatrix<I> {
    pub fn from_bitsets(rows: &[OccupancyBitset]) -> Result<Self, LabelError> {
        to_csr(rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_dense() -> Vec<Vec<bool>> {
        let rows: [[u8; 5]; 5] = [
            [0, 0, 0, 0, 1],
            [0, 1, 1, 0, 0],
            [1, 0, 0, 0, 0],
            [0, 0, 1, 1, 0],
            [0, 0, 0, 1, 0],
        ];
        rows.iter()
            .map(|r| r.iter().map(|&b| b == 1).collect())
            .collect()
    }

    #[test]
    fn row_selection() {
        let m = CsrBoolMatrix::<u32>::from_dense(&sample_dense()).unwrap();
        let s = m.select_rows(&[3, 0, 3]).unwrap();
        assert_eq!(s.row_offsets(), &[0, 2, 3, 5]);
        assert_eq!(s.col_indices(), &[2, 3, 4, 2, 3]);
        assert!(m.select_rows(&[5]).is_err());
    }

    #[test]
    fn worked_example_layout() {
        let m = CsrBoolMatrix::<u32>::from_dense(&sample_dense()).unwrap();
        assert_eq!(m.row_offsets(), &[0, 1, 3, 4, 6, 7]);
        assert_eq!(m.col_indices(), &[4, 1, 2, 0, 2, 3, 3]);
        assert_eq!(m.cols(), 5);
    }

    #[test]
    fn worked_example_from_bitsets() {
        let bitsets: Vec<OccupancyBitset> = sample_dense()
            .iter()
            .map(|r| {
                let idx = r
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b)
                    .map(|(c, _)| c as u64);
                OccupancyBitset::from_indices(1, 3, idx).unwrap()
            })
            .collect();
        let m: CsrBoolMatrix<u64> = to_csr(&bitsets).unwrap();
        assert_eq!(m.row_offsets(), &[0, 1, 3, 4, 6, 7]);
        assert_eq!(m.col_indices(), &[4, 1, 2, 0, 2, 3, 3]);
        for (i, b) in bitsets.iter().enumerate() {
            assert_eq!(&m.row_bitset(i, 1, 3).unwrap(), b);
        }
    }

    #[test]
    fn all_false_rows() {
        let rows = vec![OccupancyBitset::empty(2, 4).unwrap(); 3];
        let m: CsrBoolMatrix = to_csr(&rows).unwrap();
        assert_eq!(m.row_offsets(), &[0, 0, 0, 0]);
        assert_eq!(m.nnz(), 0);
    }

    #[test]
    fn invariants_checked() {
        assert!(CsrBoolMatrix::<u32>::from_parts(4, vec![1, 1], vec![0]).is_err());
        assert!(CsrBoolMatrix::<u32>::from_parts(4, vec![0, 2], vec![2, 1]).is_err());
        assert!(CsrBoolMatrix::<u32>::from_parts(4, vec![0, 1], vec![4]).is_err());
        assert!(CsrBoolMatrix::<u32>::from_parts(4, vec![0, 2, 1], vec![0, 1]).is_err());
        assert!(CsrBoolMatrix::<u32>::from_sorted_rows(1 << 40, [vec![1u64 << 35]]).is_err());
        assert!(CsrBoolMatrix::<u64>::from_sorted_rows(1 << 40, [vec![1u64 << 35]]).is_ok());
    }

    #[test]
    fn mixed_grids_rejected() {
        let rows = vec![
            OccupancyBitset::empty(2, 4).unwrap(),
            OccupancyBitset::empty(2, 5).unwrap(),
        ];
        assert!(to_csr::<u32>(&rows).is_err());
    }

    #[test]
    fn gap_statistics() {
        let m =
            CsrBoolMatrix::<u32>::from_sorted_rows(64, [vec![1, 2, 3, 10], vec![5, 6]]).unwrap();
        assert_eq!(m.median_gap(), Some(1));
        assert!((m.density() - 6.0 / 128.0).abs() < 1e-12);
    }
}
