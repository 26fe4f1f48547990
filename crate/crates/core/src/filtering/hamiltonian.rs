use crate::error::{check_dim, Error, Result};
use crate::quantum::ComplexMatrix;

/// Affine control law `H(u, v) = H0 + u H1 + v H2` with Hermitian parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledHamiltonian {
    pub h0: ComplexMatrix,
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
}

impl ControlledHamiltonian {
    pub fn new(h0: ComplexMatrix, h1: ComplexMatrix, h2: ComplexMatrix) -> Result<Self> {
        check_dim(h0.dim(), h1.dim())?;
        check_dim(h0.dim(), h2.dim())?;
        h0.require_hermitian("H0")?;
        h1.require_hermitian("H1")?;
        h2.require_hermitian("H2")?;
        Ok(Self { h0, h1, h2 })
    }

    /// Uncontrolled `H0` with vanishing control parts.
    pub fn fixed(h0: ComplexMatrix) -> Result<Self> {
        let z = ComplexMatrix::zeros(h0.dim());
        Self::new(h0, z.clone(), z)
    }

    pub fn zero(dim: usize) -> Self {
        let z = ComplexMatrix::zeros(dim);
        Self {
            h0: z.clone(),
            h1: z.clone(),
            h2: z,
        }
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    pub fn at(&self, u: f64, v: f64) -> ComplexMatrix {
        let mut h = self.h0.clone();
        if u != 0.0 {
            h = &h + &self.h1.scale_real(u);
        }
        if v != 0.0 {
            h = &h + &self.h2.scale_real(v);
        }
        h
    }

    pub fn is_diagonal(&self) -> bool {
        self.h0.is_diagonal() && self.h1.is_diagonal() && self.h2.is_diagonal()
    }

    pub fn require_diagonal(&self) -> Result<()> {
        if self.is_diagonal() {
            Ok(())
        } else {
            Err(Error::SchemeMismatch(
                "torus reduction needs a diagonal controlled Hamiltonian".into(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{sigma_x, sigma_z};

    #[test]
    fn affine_law() {
        let h = ControlledHamiltonian::new(sigma_z(), sigma_x(), ComplexMatrix::identity(2)).unwrap();
        let m = h.at(2.0, -1.0);
        assert_eq!(m[(0, 0)].re, 0.0);
        assert_eq!(m[(0, 1)].re, 2.0);
        assert_eq!(m[(1, 1)].re, -2.0);
        assert!(!h.is_diagonal());
    }

    #[test]
    fn rejects_non_hermitian() {
        let bad = sigma_x().scale(num_complex::Complex64::new(0.0, 1.0));
        assert!(ControlledHamiltonian::fixed(bad).is_err());
    }
}
