//! Matrix serialization: JSON as rows of `[re, im]` pairs, and a raw binary
//! layout of little-endian `f64` pairs in row-major order.

use super::{CMatrix, C64};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixJson(pub Vec<Vec<[f64; 2]>>);

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson(
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        )
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows = self.0.len();
        let cols = self.0.first().map_or(0, Vec::len);
        if let Some(bad) = self.0.iter().find(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch { expected: cols, found: bad.len() });
        }
        Ok(CMatrix::from_fn(rows, cols, |i, j| {
            let [re, im] = self.0[i][j];
            C64::new(re, im)
        }))
    }
}

pub fn write_binary<W: Write>(m: &CMatrix, mut w: W) -> Result<()> {
    w.write_all(&(m.nrows() as u64).to_le_bytes())?;
    w.write_all(&(m.ncols() as u64).to_le_bytes())?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            w.write_all(&m[(i, j)].im.to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<CMatrix> {
    let mut word = [0u8; 8];
    let mut next = |r: &mut R| -> Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let rows = u64::from_le_bytes(next(&mut r)?) as usize;
    let cols = u64::from_le_bytes(next(&mut r)?) as usize;
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            let re = f64::from_le_bytes(next(&mut r)?);
            let im = f64::from_le_bytes(next(&mut r)?);
            m[(i, j)] = C64::new(re, im);
        }
    }
    Ok(m)
}

pub fn save_json(m: &CMatrix, path: &Path) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    serde_json::to_writer(f, &MatrixJson::from(m))?;
    Ok(())
}

pub fn load_json(path: &Path) -> Result<CMatrix> {
    let f = std::io::BufReader::new(std::fs::File::open(path)?);
    let raw: MatrixJson = serde_json::from_reader(f)?;
    raw.to_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{haar_unitary, UnitaryMatrix};
    use crate::seed::RandomSeed;

    #[test]
    fn json_round_trip_is_exact() {
        let u = haar_unitary(3, RandomSeed::new(4)).unwrap();
        let text = serde_json::to_string(&u).unwrap();
        let back: UnitaryMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back.matrix(), u.matrix());
    }

    #[test]
    fn binary_round_trip_is_exact() {
        let u = haar_unitary(4, RandomSeed::new(5)).unwrap();
        let mut buf = Vec::new();
        write_binary(u.matrix(), &mut buf).unwrap();
        assert_eq!(buf.len(), 16 + 16 * 16);
        assert_eq!(&read_binary(buf.as_slice()).unwrap(), u.matrix());
    }

    #[test]
    fn ragged_json_is_rejected() {
        let raw: MatrixJson = serde_json::from_str("[[[1,0],[0,0]],[[0,0]]]").unwrap();
        assert!(raw.to_matrix().is_err());
        assert!(serde_json::from_str::<UnitaryMatrix>("[[[1,0],[0,0]],[[0,0],[2,0]]]").is_err());
    }
}
