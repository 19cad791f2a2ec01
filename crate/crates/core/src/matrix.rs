//! Dense complex matrices in row-major order.
//!
//! Every operator in the toolkit is represented this way. Matrices stay at
//! desk scale (n <= 64), so the arithmetic is plain triple loops. Dimension-0
//! matrices are legal everywhere; they show up when a pair is compressed onto
//! a trivial submodule.
//!
//! The JSON form is `{"rows":n,"cols":m,"data":[[re,im],...]}` with `data`
//! row-major. Readers reject length mismatches and non-finite entries.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, validating shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        if !data.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Real entries, row-major.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    pub fn scale(&self, factor: impl Into<Complex64>) -> Self {
        let factor = factor.into();
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||A - A*||_F`; only meaningful for square matrices.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square(), "hermitian_defect needs a square matrix");
        let mut sum = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                sum += (self.at(r, c) - self.at(c, r).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// `||self - other||_F`.
    pub fn residual_from(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "residual shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `(A + A*)/2`.
    pub fn hermitized(&self) -> Self {
        assert!(self.is_square(), "hermitized needs a square matrix");
        Self::from_fn(self.rows, self.cols, |r, c| {
            (self.at(r, c) + self.at(c, r).conj()) * 0.5
        })
    }

    /// Stacks `self` on top of `bottom`.
    pub fn vstack(&self, bottom: &Self) -> Self {
        assert_eq!(self.cols, bottom.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&bottom.data);
        Self {
            rows: self.rows + bottom.rows,
            cols: self.cols,
            data,
        }
    }

    /// Assembles `[[a, b], [c, d]]`; block shapes must be consistent.
    pub fn block2(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows, "block row mismatch");
        assert_eq!(c.rows, d.rows, "block row mismatch");
        assert_eq!(a.cols, c.cols, "block column mismatch");
        assert_eq!(b.cols, d.cols, "block column mismatch");
        let rows = a.rows + c.rows;
        let cols = a.cols + b.cols;
        Self::from_fn(rows, cols, |r, cidx| match (r < a.rows, cidx < a.cols) {
            (true, true) => a.at(r, cidx),
            (true, false) => b.at(r, cidx - a.cols),
            (false, true) => c.at(r - a.rows, cidx),
            (false, false) => d.at(r - a.rows, cidx - a.cols),
        })
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "addition shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "subtraction shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "product inner dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let lhs = self.at(r, k);
                if lhs == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += lhs * rhs.at(k, c);
                }
            }
        }
        out
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                let z = self.at(r, c);
                write!(f, " {:>+.4e}{:>+.4e}i", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixWire {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixWire {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = MatrixWire::deserialize(deserializer)?;
        let data = wire
            .data
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(wire.rows, wire.cols, data).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[a, b, c, d]).unwrap()
    }

    #[test]
    fn new_rejects_shape_and_nan() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![Complex64::new(1.0, 0.0); 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]),
            Err(Error::NotFinite)
        ));
    }

    #[test]
    fn product_and_adjoint() {
        let q = m2(1.0, 1.0, 0.0, 0.0);
        let qs = q.adjoint();
        let qsq = &qs * &q;
        assert_eq!(qsq, m2(1.0, 1.0, 1.0, 1.0));
        let z = ComplexMatrix::new(
            1,
            2,
            vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, -1.0)],
        )
        .unwrap();
        let za = z.adjoint();
        assert_eq!(za.at(0, 0), Complex64::new(0.0, -1.0));
        assert_eq!(za.at(1, 0), Complex64::new(2.0, 1.0));
    }

    #[test]
    fn empty_matrices_are_legal() {
        let e = ComplexMatrix::zeros(0, 0);
        assert!(e.is_empty());
        assert_eq!((&e * &e).shape(), (0, 0));
        assert_eq!(e.fro_norm(), 0.0);
        assert_eq!(ComplexMatrix::identity(0).shape(), (0, 0));
    }

    #[test]
    fn json_wire_format_is_exact() {
        let q = ComplexMatrix::new(
            1,
            2,
            vec![Complex64::new(1.0, -2.0), Complex64::new(0.5, 0.0)],
        )
        .unwrap();
        let text = serde_json::to_string(&q).unwrap();
        assert_eq!(text, r#"{"rows":1,"cols":2,"data":[[1.0,-2.0],[0.5,0.0]]}"#);
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn json_reader_rejects_length_mismatch() {
        let bad = r#"{"rows":2,"cols":2,"data":[[1.0,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(bad).is_err());
        let nan = r#"{"rows":1,"cols":1,"data":[[null,0.0]]}"#;
        assert!(serde_json::from_str::<ComplexMatrix>(nan).is_err());
    }

    #[test]
    fn block_assembly() {
        let a = ComplexMatrix::identity(1);
        let z = ComplexMatrix::zeros(1, 1);
        let p = ComplexMatrix::block2(&a, &z, &z, &z);
        assert_eq!(p, m2(1.0, 0.0, 0.0, 0.0));
    }
}
