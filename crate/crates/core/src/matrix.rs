//! Dense complex square matrices.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;

use crate::error::{domain, Result};

pub type C64 = Complex64;

/// `e^{i * 2π * num / den}`, reducing the angle first so that exact roots of
/// unity (1, i, -1, -i) come out exact.
pub fn root_of_unity(num: i64, den: i64) -> C64 {
    assert!(den > 0);
    let r = num.rem_euclid(den);
    // quarter turns are exact
    if (4 * r) % den == 0 {
        return match 4 * r / den {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, std::f64::consts::TAU * r as f64 / den as f64)
}

/// Square complex matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Wraps a dense matrix, rejecting non-square or non-finite input.
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(domain(format!(
                "matrix must be square, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 {
            return Err(domain("matrix dimension must be positive"));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(domain("matrix entries must be finite"));
        }
        Ok(Self(inner))
    }

    /// Builds a matrix from row slices.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(domain("rows must all have length equal to the row count"));
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Builds a matrix from real row slices.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub(crate) fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// Integer power by repeated squaring; `pow(0)` is the identity.
    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.dim());
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Kronecker product `self ⊗ rhs`.
    pub fn kron(&self, rhs: &Self) -> Self {
        Self(self.0.kronecker(&rhs.0))
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Largest entry magnitude of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// Distance from `target * I`, in the entrywise max norm.
    pub fn distance_to_scalar(&self, target: C64) -> f64 {
        let n = self.dim();
        let mut m = 0.0_f64;
        for j in 0..n {
            for i in 0..n {
                let t = if i == j { target } else { C64::new(0.0, 0.0) };
                m = m.max((self.0[(i, j)] - t).norm());
            }
        }
        m
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn determinant(&self) -> C64 {
        self.0.clone().lu().determinant()
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        SVD::new(self.0.clone(), false, false)
            .singular_values
            .iter()
            .copied()
            .collect()
    }

    /// Orthonormal basis of the numerical kernel: right singular vectors whose
    /// singular value is at most `rel_threshold * σ_max`.
    pub fn nullspace(&self, rel_threshold: f64) -> Nullspace {
        let svd = SVD::new(self.0.clone(), false, true);
        let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        let v_t = svd.v_t.expect("v_t requested");
        let cutoff = rel_threshold * sv.first().copied().unwrap_or(0.0);
        let basis = sv
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(row, _)| v_t.row(row).adjoint())
            .collect();
        Nullspace {
            basis,
            singular_values: sv,
            cutoff,
        }
    }

    pub fn mul_vec(&self, v: &DVector<C64>) -> DVector<C64> {
        &self.0 * v
    }

    pub(crate) fn add_assign(&mut self, other: &Self) {
        self.0 += &other.0;
    }

    pub(crate) fn set(&mut self, row: usize, col: usize, value: C64) {
        self.0[(row, col)] = value;
    }
}

/// Kernel basis together with the singular spectrum it was cut from.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub basis: Vec<DVector<C64>>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub cutoff: f64,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())?;
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes_and_values() {
        assert!(ComplexMatrix::new(DMatrix::zeros(2, 3)).is_err());
        assert!(ComplexMatrix::new(DMatrix::zeros(0, 0)).is_err());
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = C64::new(f64::NAN, 0.0);
        assert!(ComplexMatrix::new(m).is_err());
        assert!(ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0]]).is_err());
    }

    #[test]
    fn quarter_turns_exact() {
        assert_eq!(root_of_unity(1, 4), C64::new(0.0, 1.0));
        assert_eq!(root_of_unity(3, 6), C64::new(-1.0, 0.0));
        assert_eq!(root_of_unity(-1, 4), C64::new(0.0, -1.0));
        assert_eq!(root_of_unity(5, 5), C64::new(1.0, 0.0));
        assert!((root_of_unity(1, 3) - C64::new(-0.5, 3f64.sqrt() / 2.0)).norm() < 1e-15);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(0.3, 0.1), C64::new(1.0, -0.2)],
            vec![C64::new(-0.5, 0.0), C64::new(0.2, 0.7)],
        ])
        .unwrap();
        let mut acc = ComplexMatrix::identity(2);
        for e in 0..6 {
            assert!(m.pow(e).max_abs_diff(&acc) < 1e-14);
            acc = &acc * &m;
        }
    }

    #[test]
    fn kron_block_layout() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        let i2 = ComplexMatrix::identity(2);
        let k = a.kron(&i2);
        assert_eq!(k.get(0, 2), C64::new(2.0, 0.0));
        assert_eq!(k.get(3, 1), C64::new(3.0, 0.0));
        assert_eq!(k.get(0, 1), C64::new(0.0, 0.0));
    }

    #[test]
    fn nullspace_of_diagonal() {
        let d = ComplexMatrix::from_diagonal(&[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 2.0),
            C64::new(0.0, 0.0),
        ]);
        let ns = d.nullspace(1e-10);
        assert_eq!(ns.basis.len(), 2);
        for v in &ns.basis {
            assert!(d.mul_vec(v).norm() < 1e-14);
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        assert!(ns.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn determinant_of_triangular() {
        let m = ComplexMatrix::from_rows(&[
            vec![C64::new(2.0, 0.0), C64::new(5.0, 1.0)],
            vec![C64::new(0.0, 0.0), C64::new(0.0, 3.0)],
        ])
        .unwrap();
        assert!((m.determinant() - C64::new(0.0, 6.0)).norm() < 1e-14);
    }
}
