use num_complex::Complex64;

use super::DetectionScheme;
use crate::error::{check_dim, Result};
use crate::quantum::{ComplexMatrix, ProjectiveState};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Which process drives the equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    /// The measured output `Y`.
    #[default]
    Output,
    /// The innovation `dB^j = dY^j - <L_j + L_j*>_W dt`.
    Innovation,
}

/// Complex coefficients of `dw = drift dt + sum_j noise[j] dX^j` in the projective chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveCoefficients {
    pub drift: Vec<Complex64>,
    /// `noise[j][k]` multiplies the channel-`j` increment in `dw_k`.
    pub noise: Vec<Vec<Complex64>>,
    pub kind: NoiseKind,
}

/// Hamiltonian part `i[w_k (HW)_0 - (HW)_k]` of the projective drift.
pub fn hamiltonian_drift(h: &ComplexMatrix, w: &ProjectiveState) -> Result<Vec<Complex64>> {
    check_dim(h.dim(), w.n() + 1)?;
    let hw = h.apply(&w.lifted());
    Ok(w.coords()
        .iter()
        .enumerate()
        .map(|(k, &wk)| I * (wk * hw[0] - hw[k + 1]))
        .collect())
}

/// Channel means `<L_j + L_j*>_W`.
pub fn channel_means(scheme: &DetectionScheme, w: &ProjectiveState) -> Result<Vec<f64>> {
    if scheme.channels() > 0 {
        check_dim(scheme.dim(), w.n() + 1)?;
    }
    Ok(channel_means_of(scheme, &w.lifted()))
}

pub(crate) fn channel_means_of(scheme: &DetectionScheme, v: &[Complex64]) -> Vec<f64> {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    scheme
        .couplings()
        .iter()
        .map(|l| {
            let lv = l.apply(v);
            let inner: Complex64 = v.iter().zip(&lv).map(|(a, b)| a.conj() * b).sum();
            2.0 * inner.re / norm
        })
        .collect()
}

/// Drift and noise coefficients of the projective filtering equation at `w`.
///
/// For `k >= 1`, with `W = (1, w)`,
///
/// ```text
/// drift_k = i[w_k (HW)_0 - (HW)_k]
///         + sum_j 1/2 [w_k (L_j*L_j W)_0 - (L_j*L_j W)_k]
///         + sum_j [w_k (L_j W)_0^2 - (L_j W)_0 (L_j W)_k]
/// noise_jk = (L_j W)_k - w_k (L_j W)_0
/// ```
///
/// In innovation form the drift gains `sum_j noise_j <L_j + L_j*>_W`.
pub fn projective_coefficients(
    scheme: &DetectionScheme,
    h: &ComplexMatrix,
    w: &ProjectiveState,
    kind: NoiseKind,
) -> Result<ProjectiveCoefficients> {
    let mut drift = hamiltonian_drift(h, w)?;
    if scheme.channels() > 0 {
        check_dim(scheme.dim(), w.n() + 1)?;
    }
    let big_w = w.lifted();
    let norm: f64 = big_w.iter().map(|z| z.norm_sqr()).sum();
    let coords = w.coords();
    let mut noise = Vec::with_capacity(scheme.channels());
    for l in scheme.couplings() {
        let lw = l.apply(&big_w);
        let llw = l.adjoint().apply(&lw);
        let row: Vec<Complex64> = coords
            .iter()
            .enumerate()
            .map(|(k, &wk)| lw[k + 1] - wk * lw[0])
            .collect();
        for (k, &wk) in coords.iter().enumerate() {
            drift[k] += 0.5 * (wk * llw[0] - llw[k + 1]) + wk * lw[0] * lw[0] - lw[0] * lw[k + 1];
        }
        if kind == NoiseKind::Innovation {
            let inner: Complex64 = big_w.iter().zip(&lw).map(|(a, b)| a.conj() * b).sum();
            let mean = 2.0 * inner.re / norm;
            for (d, n) in drift.iter_mut().zip(&row) {
                *d += n * mean;
            }
        }
        noise.push(row);
    }
    Ok(ProjectiveCoefficients { drift, noise, kind })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{sigma_x, sigma_z};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn drift_field_examples() {
        let w = ProjectiveState::new(vec![c(0.3, -0.7)]).unwrap();
        let wk = w.coords()[0];
        let id = hamiltonian_drift(&ComplexMatrix::identity(2), &w).unwrap();
        assert!(id[0].norm() < 1e-15);
        let z = hamiltonian_drift(&sigma_z(), &w).unwrap();
        assert!((z[0] - 2.0 * I * wk).norm() < 1e-15);
        let x = hamiltonian_drift(&sigma_x(), &w).unwrap();
        assert!((x[0] - I * (wk * wk - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_noise_rows_match_displayed_form() {
        let w = ProjectiveState::new(vec![c(0.4, 1.3)]).unwrap();
        let wk = w.coords()[0];
        let co = projective_coefficients(
            &DetectionScheme::pauli(),
            &ComplexMatrix::zeros(2),
            &w,
            NoiseKind::Output,
        )
        .unwrap();
        let want = [1.0 - wk * wk, I * (1.0 + wk * wk), -2.0 * wk];
        for (row, want) in co.noise.iter().zip(want) {
            assert!((row[0] - want).norm() < 1e-14);
        }
        assert!(co.drift[0].norm() < 1e-14);
    }

    #[test]
    fn pauli_channel_means_at_north_pole() {
        let m = channel_means(&DetectionScheme::pauli(), &ProjectiveState::origin(1)).unwrap();
        assert_eq!(m, vec![0.0, 0.0, 2.0]);
    }
}
