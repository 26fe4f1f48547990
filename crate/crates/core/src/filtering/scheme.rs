use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{gell_mann, pauli, ComplexMatrix, HERMITIAN_TOL};

/// Family a detection scheme belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// The three Pauli matrices on a qubit.
    PauliSphere,
    /// All `d^2 - 1` Gell-Mann matrices on a qudit.
    GellMannProjective,
    /// `L_j = i r_j E_jj`, `j = 1..n`, on `C^(n+1)`.
    TorusDiagonal,
    /// `2n` channels with a single first-column entry each, on `C^(n+1)`.
    EuclideanColumn,
    Custom,
}

/// A homodyne detection arrangement: one coupling operator per output channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionScheme {
    kind: SchemeKind,
    couplings: Vec<ComplexMatrix>,
    labels: Vec<String>,
}

impl DetectionScheme {
    /// Builds a scheme and checks the structural invariants of `kind`.
    pub fn new(kind: SchemeKind, couplings: Vec<ComplexMatrix>, labels: Vec<String>) -> Result<Self> {
        if couplings.is_empty() && kind != SchemeKind::Custom {
            return Err(Error::domain("scheme without couplings"));
        }
        if labels.len() != couplings.len() {
            return Err(Error::DimensionMismatch {
                expected: couplings.len(),
                got: labels.len(),
            });
        }
        if let Some(first) = couplings.first() {
            for l in &couplings {
                crate::error::check_dim(first.dim(), l.dim())?;
            }
        }
        let scheme = Self {
            kind,
            couplings,
            labels,
        };
        scheme.validate()?;
        Ok(scheme)
    }

    /// Couplings with default labels `L1, L2, ...`.
    pub fn custom(couplings: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (1..=couplings.len()).map(|j| format!("L{j}")).collect();
        Self::new(SchemeKind::Custom, couplings, labels)
    }

    /// A scheme with no channels on `C^dim` (pure Schrödinger evolution).
    pub fn empty(dim: usize) -> Result<Self> {
        let _ = ComplexMatrix::from_fn(dim, |_, _| Complex64::new(0.0, 0.0))?;
        Ok(Self {
            kind: SchemeKind::Custom,
            couplings: Vec::new(),
            labels: Vec::new(),
        })
    }

    pub fn pauli() -> Self {
        let labels = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
        Self {
            kind: SchemeKind::PauliSphere,
            couplings: pauli().to_vec(),
            labels,
        }
    }

    pub fn gell_mann(d: usize) -> Result<Self> {
        let couplings = gell_mann(d)?;
        let mut labels = Vec::with_capacity(couplings.len());
        for tag in ["s", "a"] {
            for j in 0..d {
                for k in j + 1..d {
                    labels.push(format!("{j}{k},{tag}"));
                }
            }
        }
        for k in 1..d {
            labels.push(format!("{k},d"));
        }
        Ok(Self {
            kind: SchemeKind::GellMannProjective,
            couplings,
            labels,
        })
    }

    /// Anti-Hermitian diagonal scheme with rates `r_1..r_n` on `C^(n+1)`.
    pub fn torus_diagonal(rates: &[f64]) -> Result<Self> {
        let d = rates.len() + 1;
        let mut couplings = Vec::with_capacity(rates.len());
        for (j, &r) in rates.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::domain("non-finite torus rate"));
            }
            let m = ComplexMatrix::from_fn(d, |a, b| {
                if a == j + 1 && b == j + 1 {
                    Complex64::new(0.0, r)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?;
            couplings.push(m);
        }
        let labels = (1..=rates.len()).map(|k| k.to_string()).collect();
        Self::new(SchemeKind::TorusDiagonal, couplings, labels)
    }

    /// The `2n` first-column couplings `L_k1 = E_k0`, `L_k2 = i E_k0` on `C^(n+1)`,
    /// ordered `(1,1), (1,2), ..., (n,1), (n,2)`.
    pub fn euclidean(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("Euclidean scheme needs n >= 1"));
        }
        let d = n + 1;
        let mut couplings = Vec::with_capacity(2 * n);
        let mut labels = Vec::with_capacity(2 * n);
        for k in 1..=n {
            for (c, z) in [(1, Complex64::new(1.0, 0.0)), (2, Complex64::new(0.0, 1.0))] {
                couplings.push(ComplexMatrix::from_fn(d, |a, b| {
                    if a == k && b == 0 {
                        z
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })?);
                labels.push(format!("{k}{c}"));
            }
        }
        Self::new(SchemeKind::EuclideanColumn, couplings, labels)
    }

    fn validate(&self) -> Result<()> {
        match self.kind {
            SchemeKind::Custom => Ok(()),
            SchemeKind::PauliSphere => {
                if self.couplings.as_slice() == pauli().as_slice() {
                    Ok(())
                } else {
                    Err(Error::domain("Pauli scheme couplings must be sigma_1, sigma_2, sigma_3"))
                }
            }
            SchemeKind::GellMannProjective => {
                let d = self.dim();
                if self.couplings == gell_mann(d)? {
                    Ok(())
                } else {
                    Err(Error::domain("Gell-Mann scheme couplings must follow the fixed basis"))
                }
            }
            SchemeKind::TorusDiagonal => {
                let d = self.dim();
                if self.couplings.len() != d - 1 {
                    return Err(Error::domain("torus scheme needs one channel per chart coordinate"));
                }
                for (j, l) in self.couplings.iter().enumerate() {
                    for a in 0..d {
                        for b in 0..d {
                            let z = l[(a, b)];
                            let ok = if a == j + 1 && b == j + 1 {
                                z.re.abs() < HERMITIAN_TOL
                            } else {
                                z.norm() < HERMITIAN_TOL
                            };
                            if !ok {
                                return Err(Error::domain(format!(
                                    "torus coupling {j} is not i r E_jj at ({a}, {b})"
                                )));
                            }
                        }
                    }
                }
                Ok(())
            }
            SchemeKind::EuclideanColumn => {
                let d = self.dim();
                for l in &self.couplings {
                    for a in 0..d {
                        for b in 0..d {
                            if (b != 0 || a == 0) && l[(a, b)].norm() >= HERMITIAN_TOL {
                                return Err(Error::domain(
                                    "Euclidean coupling has entries outside the first column",
                                ));
                            }
                        }
                    }
                }
                Ok(())
            }
        }
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn couplings(&self) -> &[ComplexMatrix] {
        &self.couplings
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn channels(&self) -> usize {
        self.couplings.len()
    }

    /// Hilbert-space dimension; 0 for a scheme without couplings.
    pub fn dim(&self) -> usize {
        self.couplings.first().map_or(0, |l| l.dim())
    }

    /// Rates `r_k` of a torus scheme.
    pub fn torus_rates(&self) -> Option<Vec<f64>> {
        (self.kind == SchemeKind::TorusDiagonal).then(|| {
            self.couplings
                .iter()
                .enumerate()
                .map(|(j, l)| l[(j + 1, j + 1)].im)
                .collect()
        })
    }
}
