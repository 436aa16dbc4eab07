//! JSON forms: a complex number is `[re, im]`; a matrix is
//! `{"rows": r, "cols": c, "entries": [[re, im], ...]}` in row-major order;
//! a state vector is `{"dim": n, "amplitudes": [[re, im], ...]}`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ComplexMatrix, DensityMatrix, StateVector, C64};

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    rows: usize,
    cols: usize,
    entries: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct VectorRepr {
    dim: usize,
    amplitudes: Vec<[f64; 2]>,
}

fn pairs(z: &[C64]) -> Vec<[f64; 2]> {
    z.iter().map(|z| [z.re, z.im]).collect()
}

fn complexes(p: &[[f64; 2]]) -> Vec<C64> {
    p.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixRepr {
            rows: self.rows,
            cols: self.cols,
            entries: pairs(&self.data),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        ComplexMatrix::from_vec(r.rows, r.cols, complexes(&r.entries)).map_err(D::Error::custom)
    }
}

impl Serialize for StateVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VectorRepr {
            dim: self.dim(),
            amplitudes: pairs(&self.amps),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = VectorRepr::deserialize(d)?;
        if r.amplitudes.len() != r.dim {
            return Err(D::Error::custom(format!(
                "dim {} but {} amplitudes",
                r.dim,
                r.amplitudes.len()
            )));
        }
        if r.amplitudes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(D::Error::custom("non-finite amplitude"));
        }
        Ok(StateVector::new(complexes(&r.amplitudes)))
    }
}

/// Density matrices use the plain matrix schema; validity is checked by the
/// caller through [`DensityMatrix::new`] after decoding.
impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn matrix_schema() {
        let m = ComplexMatrix::from_rows(&[[C64::new(1.0, -2.0), C64::new(0.0, 0.5)]]);
        let j = serde_json::to_string(&m).unwrap();
        assert_eq!(j, r#"{"rows":1,"cols":2,"entries":[[1.0,-2.0],[0.0,0.5]]}"#);
    }

    #[test]
    fn rejects_wrong_entry_count() {
        let bad = r#"{"rows":2,"cols":2,"entries":[[1,0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
        let bad_vec = r#"{"dim":2,"amplitudes":[[1,0]]}"#;
        assert!(serde_json::from_str::<StateVector>(bad_vec).is_err());
    }

    proptest! {
        #[test]
        fn matrix_round_trip(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-1e6f64..1e6, 50)) {
            let data: Vec<C64> = (0..rows * cols).map(|k| C64::new(seed[k % 50], seed[(k * 7 + 3) % 50])).collect();
            let m = ComplexMatrix::from_vec(rows, cols, data).unwrap();
            let back: ComplexMatrix = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
