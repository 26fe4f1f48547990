use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quantum::{trace_inner, ComplexMatrix, HERMITIAN_TOL};

/// Outcome of the isothermality test for three qubit couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct IsothermalReport {
    /// Second-order part proportional to the flat Laplacian in the chart.
    pub is_isothermal: bool,
    /// Common value `a` of `tr(L_j L_j)` over the traceless parts.
    pub scale: f64,
    /// One-based index pairs `(j, k)`, `j <= k`, violating `tr(L_j L_k) = a delta_jk`.
    pub failing_pairs: Vec<(usize, usize)>,
    /// All couplings traceless (`L^0 = -L^1`), so first-order terms cancel as well.
    pub first_order_cancellation: bool,
}

/// Tests three Hermitian `2 x 2` couplings for the orthogonality condition
/// `tr(L_j L_k) = a delta_jk`, `a > 0`.
///
/// The Gram matrix is taken over the traceless parts: the noise rows, and hence the
/// second-order part, depend on nothing else. Tracelessness itself is reported separately.
pub fn check_isothermal(couplings: &[ComplexMatrix]) -> Result<IsothermalReport> {
    if couplings.len() != 3 {
        return Err(Error::domain(format!(
            "isothermality test needs 3 couplings, got {}",
            couplings.len()
        )));
    }
    for (j, l) in couplings.iter().enumerate() {
        if l.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: l.dim(),
            });
        }
        l.require_hermitian(&format!("L_{}", j + 1))?;
    }
    let traceless: Vec<ComplexMatrix> = couplings
        .iter()
        .map(|l| {
            let shift = l.trace() / 2.0;
            l - &ComplexMatrix::identity(2).scale(shift)
        })
        .collect();
    let mut gram = [[0.0; 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            gram[j][k] = trace_inner(&traceless[j], &traceless[k])?;
        }
    }
    let scale = (gram[0][0] + gram[1][1] + gram[2][2]) / 3.0;
    let tol = 1e-10 * scale.abs().max(1.0);
    let mut failing_pairs = Vec::new();
    for j in 0..3 {
        for k in j..3 {
            let want = if j == k { scale } else { 0.0 };
            if (gram[j][k] - want).abs() > tol {
                failing_pairs.push((j + 1, k + 1));
            }
        }
    }
    let is_isothermal = failing_pairs.is_empty() && scale > tol;
    let first_order_cancellation = couplings
        .iter()
        .all(|l| (l.trace() - Complex64::new(0.0, 0.0)).norm() < HERMITIAN_TOL);
    Ok(IsothermalReport {
        is_isothermal,
        scale,
        failing_pairs,
        first_order_cancellation,
    })
}
