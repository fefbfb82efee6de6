use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::WorkspaceError;

/// Largest depth for which a dense bitset is allocated.
pub const MAX_BITSET_DEPTH: u32 = 36;

const MAGIC: &[u8; 4] = b"OCCB";

/// One bit per workspace cell, packed into little-endian 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupancyBitset {
    dims: u32,
    depth: u32,
    words: Vec<u64>,
}

impl OccupancyBitset {
    pub fn empty(dims: u32, depth: u32) -> Result<Self, WorkspaceError> {
        if depth > MAX_BITSET_DEPTH {
            return Err(WorkspaceError::TooDeep(depth));
        }
        let words = ((1u64 << depth).div_ceil(64)) as usize;
        Ok(OccupancyBitset {
            dims,
            depth,
            words: vec![0; words],
        })
    }

    pub fn full(dims: u32, depth: u32) -> Result<Self, WorkspaceError> {
        let mut b = Self::empty(dims, depth)?;
        b.words.fill(u64::MAX);
        b.trim();
        Ok(b)
    }

    pub fn from_indices(
        dims: u32,
        depth: u32,
        indices: impl IntoIterator<Item = u64>,
    ) -> Result<Self, WorkspaceError> {
        let mut b = Self::empty(dims, depth)?;
        for i in indices {
            if i >= b.len() {
                return Err(WorkspaceError::IndexOutOfRange(i));
            }
            b.insert(i);
        }
        Ok(b)
    }

    fn trim(&mut self) {
        let rem = self.len() % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of cells, `2^d`.
    pub fn len(&self) -> u64 {
        1 << self.depth
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: u64) -> bool {
        self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert(&mut self, i: u64) {
        self.words[(i >> 6) as usize] |= 1 << (i & 63);
    }

    pub fn remove(&mut self, i: u64) {
        self.words[(i >> 6) as usize] &= !(1 << (i & 63));
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Fraction of cells set.
    pub fn occupancy(&self) -> f64 {
        self.count_ones() as f64 / self.len() as f64
    }

    fn check_shape(&self, other: &Self) -> Result<(), WorkspaceError> {
        if (self.dims, self.depth) != (other.dims, other.depth) {
            return Err(WorkspaceError::GridMismatch(
                (self.dims, self.depth),
                (other.dims, other.depth),
            ));
        }
        Ok(())
    }

    /// Whether any cell is set in both.
    pub fn intersects(&self, other: &Self) -> Result<bool, WorkspaceError> {
        self.check_shape(other)?;
        Ok(self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0))
    }

    pub fn union_with(&mut self, other: &Self) -> Result<(), WorkspaceError> {
        self.check_shape(other)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
        Ok(())
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, WorkspaceError> {
        self.check_shape(other)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0))
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.trim();
        out
    }

    /// Set cell indices in ascending order.
    pub fn iter_ones(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(((wi as u64) << 6) + t)
            })
        })
    }

    /// 16-byte header (`OCCB`, k, d, reserved) followed by the words.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), WorkspaceError> {
        w.write_all(MAGIC)?;
        w.write_u32::<LittleEndian>(self.dims)?;
        w.write_u32::<LittleEndian>(self.depth)?;
        w.write_u32::<LittleEndian>(0)?;
        for &word in &self.words {
            w.write_u64::<LittleEndian>(word)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, WorkspaceError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(WorkspaceError::Format("bad magic".into()));
        }
        let dims = r.read_u32::<LittleEndian>()?;
        let depth = r.read_u32::<LittleEndian>()?;
        let _reserved = r.read_u32::<LittleEndian>()?;
        let mut b = Self::empty(dims, depth)?;
        r.read_u64_into::<LittleEndian>(&mut b.words)?;
        let before = b.words.clone();
        b.trim();
        if b.words != before {
            return Err(WorkspaceError::Format(
                "bits set beyond the last cell".into(),
            ));
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_and_empty() {
        let f = OccupancyBitset::full(2, 3).unwrap();
        assert_eq!(f.count_ones(), 8);
        assert_eq!(f.occupancy(), 1.0);
        let e = OccupancyBitset::empty(2, 3).unwrap();
        assert!(e.is_empty());
        assert_eq!(f.complement(), e);
        assert!(OccupancyBitset::empty(3, 40).is_err());
    }

    #[test]
    fn intersection_cases() {
        let a = OccupancyBitset::from_indices(3, 9, [1, 100, 300]).unwrap();
        let b = OccupancyBitset::from_indices(3, 9, [2, 101, 299]).unwrap();
        assert!(a.intersects(&a).unwrap());
        assert!(!a.intersects(&b).unwrap());
        let c = OccupancyBitset::from_indices(3, 12, [1]).unwrap();
        assert!(matches!(
            a.intersects(&c),
            Err(WorkspaceError::GridMismatch(..))
        ));
        let d = OccupancyBitset::from_indices(2, 9, [1]).unwrap();
        assert!(a.intersects(&d).is_err());
    }

    #[test]
    fn iter_ones_ascending() {
        let idx = [0u64, 5, 63, 64, 65, 511];
        let a = OccupancyBitset::from_indices(3, 9, idx).unwrap();
        assert_eq!(a.iter_ones().collect::<Vec<_>>(), idx.to_vec());
        assert!(OccupancyBitset::from_indices(3, 9, [512]).is_err());
    }

    #[test]
    fn file_round_trip_and_header() {
        let a = OccupancyBitset::from_indices(3, 7, [3, 77, 127]).unwrap();
        let mut buf = Vec::new();
        a.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 2 * 8);
        assert_eq!(&buf[..4], b"OCCB");
        assert_eq!(&buf[4..12], &[3, 0, 0, 0, 7, 0, 0, 0]);
        assert_eq!(OccupancyBitset::read_from(&buf[..]).unwrap(), a);
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(OccupancyBitset::read_from(&bad[..]).is_err());
    }
}
