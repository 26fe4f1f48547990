use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};

/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 16;

/// Absolute tolerance of the structural predicates (Hermitian, traceless, ...).
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense square complex matrix of dimension at most [`MAX_DIM`].
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_size(dim)?;
        check_dim(dim * dim, entries.len())?;
        Ok(Self(DMatrix::from_row_slice(dim, dim, &entries)))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_size(dim)?;
        Ok(Self(DMatrix::from_fn(dim, dim, f)))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn diagonal(diag: &[Complex64]) -> Result<Self> {
        check_size(diag.len())?;
        Ok(Self(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag))))
    }

    pub fn real_diagonal(diag: &[f64]) -> Result<Self> {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&d)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// `A v` for a vector of matching length.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        debug_assert_eq!(v.len(), n);
        (0..n)
            .map(|r| (0..n).map(|c| self.0[(r, c)] * v[c]).sum())
            .collect()
    }

    /// Kronecker product `self ⊗ other`, indexed as `(j, k) -> j * dim(other) + k`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        check_size(self.dim() * other.dim())?;
        Ok(Self(self.0.kronecker(&other.0)))
    }

    fn max_abs_diff(&self, other: &DMatrix<Complex64>) -> f64 {
        self.0
            .iter()
            .zip(other.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.max_abs_diff(&self.0.adjoint()) < HERMITIAN_TOL
    }

    pub fn is_anti_hermitian(&self) -> bool {
        self.max_abs_diff(&(-self.0.adjoint())) < HERMITIAN_TOL
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().norm() < HERMITIAN_TOL
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|r| (0..n).all(|c| r == c || self.0[(r, c)].norm() < HERMITIAN_TOL))
    }

    /// Errors unless the matrix is Hermitian; inputs are never symmetrized.
    pub fn require_hermitian(&self, what: &str) -> Result<()> {
        if self.is_hermitian() {
            Ok(())
        } else {
            Err(Error::domain(format!("{what} is not Hermitian")))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn check_size(dim: usize) -> Result<()> {
    if dim == 0 || dim > MAX_DIM {
        Err(Error::domain(format!(
            "matrix dimension {dim} outside 1..={MAX_DIM}"
        )))
    } else {
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
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

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        writeln!(f, "ComplexMatrix({n}x{n}) [")?;
        for r in 0..n {
            write!(f, "  ")?;
            for c in 0..n {
                let z = self.0[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
