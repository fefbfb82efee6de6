use std::io::{Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use super::{ColIndex, CsrBoolMatrix, LabelError, LabelMatrix};
use crate::ltl::Alphabet;

const CSR_MAGIC: &[u8; 4] = b"CSRB";
const LABEL_MAGIC: &[u8; 4] = b"LABM";
const WIDE_FLAG: u32 = 1;

impl<I: ColIndex> CsrBoolMatrix<I> {
    /// Writes the matrix. Offsets and indices are stored as 32-bit words
    /// unless either overflows, in which case the header flags a 64-bit file.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), LabelError> {
        let wide = self.nnz() as u64 > u32::MAX as u64 || self.cols() > 1 << 32;
        w.write_all(CSR_MAGIC)?;
        w.write_u32::<LittleEndian>(if wide { WIDE_FLAG } else { 0 })?;
        w.write_u64::<LittleEndian>(self.rows() as u64)?;
        w.write_u64::<LittleEndian>(self.cols())?;
        w.write_u64::<LittleEndian>(self.nnz() as u64)?;
        let mut put = |x: u64| -> std::io::Result<()> {
            if wide {
                w.write_u64::<LittleEndian>(x)
            } else {
                w.write_u32::<LittleEndian>(x as u32)
            }
        };
        for &o in self.row_offsets() {
            put(o as u64)?;
        }
        for c in self.col_indices() {
            put(c.to_u64().unwrap())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, LabelError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CSR_MAGIC {
            return Err(LabelError::Format("not a CSR matrix file".into()));
        }
        let wide = r.read_u32::<LittleEndian>()? & WIDE_FLAG != 0;
        let rows = r.read_u64::<LittleEndian>()?;
        let cols = r.read_u64::<LittleEndian>()?;
        let nnz = r.read_u64::<LittleEndian>()?;
        let mut get = || -> std::io::Result<u64> {
            if wide {
                r.read_u64::<LittleEndian>()
            } else {
                r.read_u32::<LittleEndian>().map(u64::from)
            }
        };
        let mut offsets = Vec::with_capacity(rows as usize + 1);
        for _ in 0..=rows {
            offsets.push(get()? as usize);
        }
        let mut indices = Vec::with_capacity(nnz as usize);
        for _ in 0..nnz {
            let c = get()?;
            indices.push(I::from(c).ok_or(LabelError::IndexOverflow(c))?);
        }
        CsrBoolMatrix::from_parts(cols, offsets, indices)
    }
}

impl LabelMatrix {
    /// CSV with one line per edge: `edge,labels`, labels joined by `;`.
    pub fn write_csv<W: Write>(&self, alphabet: &Alphabet, mut w: W) -> Result<(), LabelError> {
        if alphabet.len() != self.props() {
            return Err(super::mismatch(
                format!("{} label columns", self.props()),
                format!("{} propositions", alphabet.len()),
            ));
        }
        writeln!(w, "edge,labels")?;
        for i in 0..self.rows() {
            let names: Vec<&str> = (0..self.props())
                .filter(|&j| self.get(i, j))
                .filter_map(|j| alphabet.name(j))
                .collect();
            writeln!(w, "{i},{}", names.join(";"))?;
        }
        Ok(())
    }

    pub fn read_csv<R: std::io::BufRead>(alphabet: &Alphabet, r: R) -> Result<Self, LabelError> {
        let mut lines = r.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "edge,labels" => {}
            _ => return Err(LabelError::Format("missing `edge,labels` header".into())),
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            let (id, labels) = line
                .split_once(',')
                .ok_or_else(|| LabelError::Format(format!("line {}: missing comma", n + 2)))?;
            if id.trim().parse::<usize>().ok() != Some(rows.len()) {
                return Err(LabelError::Format(format!(
                    "line {}: expected edge {}",
                    n + 2,
                    rows.len()
                )));
            }
            let mut mask = 0u64;
            for name in labels.split(';').map(str::trim).filter(|s| !s.is_empty()) {
                let j = alphabet.id(name).ok_or_else(|| {
                    LabelError::Format(format!("line {}: unknown proposition `{name}`", n + 2))
                })?;
                mask |= 1 << j;
            }
            rows.push(mask);
        }
        LabelMatrix::from_masks(alphabet.len(), rows)
    }

    /// Packed binary: magic, rows (u64), props (u32), reserved (u32), then
    /// one little-endian u64 mask per row.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<(), LabelError> {
        w.write_all(LABEL_MAGIC)?;
        w.write_u64::<LittleEndian>(self.rows() as u64)?;
        w.write_u32::<LittleEndian>(self.props() as u32)?;
        w.write_u32::<LittleEndian>(0)?;
        for &m in self.masks() {
            w.write_u64::<LittleEndian>(m)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self, LabelError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != LABEL_MAGIC {
            return Err(LabelError::Format("not a label matrix file".into()));
        }
        let rows = r.read_u64::<LittleEndian>()?;
        let props = r.read_u32::<LittleEndian>()? as usize;
        r.read_u32::<LittleEndian>()?;
        let mut masks = vec![0u64; rows as usize];
        r.read_u64_into::<LittleEndian>(&mut masks)?;
        LabelMatrix::from_masks(props, masks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csr_round_trip() {
        let m = CsrBoolMatrix::<u32>::from_sorted_rows(16, [vec![1, 4], vec![], vec![15]]).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 32 + 4 * 4 + 3 * 4);
        assert_eq!(CsrBoolMatrix::<u32>::read_from(&buf[..]).unwrap(), m);
        let wide = CsrBoolMatrix::<u64>::read_from(&buf[..]).unwrap();
        assert_eq!(wide.col_indices(), &[1, 4, 15]);
    }

    #[test]
    fn csr_wide_columns() {
        let m = CsrBoolMatrix::<u64>::from_sorted_rows(1 << 36, [vec![(1 << 35) + 3]]).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(CsrBoolMatrix::<u64>::read_from(&buf[..]).unwrap(), m);
        assert!(matches!(
            CsrBoolMatrix::<u32>::read_from(&buf[..]),
            Err(LabelError::IndexOverflow(_))
        ));
    }

    #[test]
    fn labels_csv_and_binary() {
        let a = Alphabet::new(&["moving_vehicle", "not_nominal_lane"]).unwrap();
        let l = LabelMatrix::from_masks(2, vec![0, 1, 3, 2]).unwrap();
        let mut csv = Vec::new();
        l.write_csv(&a, &mut csv).unwrap();
        let text = String::from_utf8(csv.clone()).unwrap();
        assert_eq!(text, "edge,labels\n0,\n1,moving_vehicle\n2,moving_vehicle;not_nominal_lane\n3,not_nominal_lane\n");
        assert_eq!(LabelMatrix::read_csv(&a, &csv[..]).unwrap(), l);
        let mut bin = Vec::new();
        l.write_to(&mut bin).unwrap();
        assert_eq!(LabelMatrix::read_from(&bin[..]).unwrap(), l);
    }
}
