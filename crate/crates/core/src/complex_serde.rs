//! Serde adapters writing complex vectors and matrices as nested arrays of
//! `[re, im]` pairs.

use crate::numerics::{ComplexMatrix, ComplexVector};
use num_complex::Complex64;
use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

fn pair(z: &Complex64) -> [f64; 2] {
    [z.re, z.im]
}

pub mod vector {
    use super::*;

    pub fn serialize<S: Serializer>(v: &ComplexVector, s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(pair).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexVector, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(ComplexVector::from_iterator(
            raw.len(),
            raw.iter().map(|[re, im]| Complex64::new(*re, *im)),
        ))
    }
}

pub mod matrix {
    use super::*;

    /// Row-major: outer array holds rows.
    pub fn serialize<S: Serializer>(m: &ComplexMatrix, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| pair(&m[(i, j)])).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<ComplexMatrix, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(D::Error::custom("ragged complex matrix"));
        }
        Ok(ComplexMatrix::from_fn(r, c, |i, j| {
            let [re, im] = rows[i][j];
            Complex64::new(re, im)
        }))
    }
}
