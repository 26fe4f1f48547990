use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{check_dim, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::new(2, vec![ONE, ZERO, ZERO, -ONE]).unwrap()
}

/// The three Pauli matrices `(sigma_1, sigma_2, sigma_3)`.
pub fn pauli() -> [ComplexMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Generalized Pauli (Gell-Mann) basis of `su(d)`: `d^2 - 1` Hermitian traceless matrices
/// normalized to `tr(L_j L_k) = 2 delta_jk`.
///
/// The order is part of the noise-channel indexing of the detection schemes built from it:
/// first the symmetric `s_jk` for `0 <= j < k < d` in lexicographic order, then the
/// antisymmetric `a_jk` (`-i` at `(j, k)`, `i` at `(k, j)`) in the same order, then the
/// diagonal `d_1, ..., d_{d-1}` with `d_k = sqrt(2 / (k (k + 1))) diag(1, ..., 1, -k, 0, ...)`.
/// For `d = 2` this is `(sigma_1, sigma_2, sigma_3)`.
pub fn gell_mann(d: usize) -> Result<Vec<ComplexMatrix>> {
    if !(2..=super::MAX_DIM).contains(&d) {
        return Err(Error::domain(format!(
            "Gell-Mann dimension {d} outside 2..={}",
            super::MAX_DIM
        )));
    }
    let pairs: Vec<(usize, usize)> = (0..d)
        .flat_map(|j| (j + 1..d).map(move |k| (j, k)))
        .collect();
    let mut out = Vec::with_capacity(d * d - 1);
    for &(j, k) in &pairs {
        out.push(ComplexMatrix::from_fn(d, |r, c| {
            if (r, c) == (j, k) || (r, c) == (k, j) {
                ONE
            } else {
                ZERO
            }
        })?);
    }
    for &(j, k) in &pairs {
        out.push(ComplexMatrix::from_fn(d, |r, c| {
            if (r, c) == (j, k) {
                -I
            } else if (r, c) == (k, j) {
                I
            } else {
                ZERO
            }
        })?);
    }
    for k in 1..d {
        let norm = (2.0 / (k * (k + 1)) as f64).sqrt();
        let diag: Vec<f64> = (0..d)
            .map(|i| match i.cmp(&k) {
                std::cmp::Ordering::Less => norm,
                std::cmp::Ordering::Equal => -(k as f64) * norm,
                std::cmp::Ordering::Greater => 0.0,
            })
            .collect();
        out.push(ComplexMatrix::real_diagonal(&diag)?);
    }
    Ok(out)
}

/// `Re tr(L_j L_k)`.
pub fn trace_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    Ok((a * b).trace().re)
}
