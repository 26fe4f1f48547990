use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{projective_coefficients, DetectionScheme, NoiseKind};
use crate::error::{check_dim, Error, Result};
use crate::quantum::{ComplexMatrix, ProjectiveState, StateVector};

const I: Complex64 = Complex64::new(0.0, 1.0);

fn check_channels(scheme: &DetectionScheme, dy: &[f64]) -> Result<()> {
    check_dim(scheme.channels(), dy.len())
}

/// One Euler–Maruyama step of the linear filtering equation for `chi`.
pub fn step_linear_chi(
    chi: &StateVector,
    h: &ComplexMatrix,
    scheme: &DetectionScheme,
    dy: &[f64],
    dt: f64,
) -> Result<StateVector> {
    check_dim(h.dim(), chi.dim())?;
    check_channels(scheme, dy)?;
    if scheme.channels() > 0 {
        check_dim(scheme.dim(), chi.dim())?;
    }
    let x = chi.components();
    let hx = h.apply(x);
    let mut next: Vec<Complex64> = x
        .iter()
        .zip(&hx)
        .map(|(xi, hxi)| xi - I * hxi * dt)
        .collect();
    for (l, &dyj) in scheme.couplings().iter().zip(dy) {
        let lx = l.apply(x);
        let llx = l.adjoint().apply(&lx);
        for ((n, a), b) in next.iter_mut().zip(&lx).zip(&llx) {
            *n += a * dyj - 0.5 * b * dt;
        }
    }
    StateVector::new(next)
}

/// One Euler–Maruyama step of the projective equation driven by output increments,
/// with the default chart guard.
pub fn step_projective(
    w: &ProjectiveState,
    h: &ComplexMatrix,
    scheme: &DetectionScheme,
    dy: &[f64],
    dt: f64,
) -> Result<ProjectiveState> {
    step_projective_guarded(
        w,
        h,
        scheme,
        dy,
        dt,
        NoiseKind::Output,
        ProjectiveState::DEFAULT_GUARD,
    )
}

/// Projective step with explicit noise convention (`dx` are output or innovation
/// increments per `kind`) and chart guard.
pub fn step_projective_guarded(
    w: &ProjectiveState,
    h: &ComplexMatrix,
    scheme: &DetectionScheme,
    dx: &[f64],
    dt: f64,
    kind: NoiseKind,
    guard: f64,
) -> Result<ProjectiveState> {
    check_channels(scheme, dx)?;
    let co = projective_coefficients(scheme, h, w, kind)?;
    let mut next: Vec<Complex64> = w
        .coords()
        .iter()
        .zip(&co.drift)
        .map(|(wk, d)| wk + d * dt)
        .collect();
    for (row, &x) in co.noise.iter().zip(dx) {
        for (n, s) in next.iter_mut().zip(row) {
            *n += s * x;
        }
    }
    let next = ProjectiveState::new(next)?;
    next.check_guard(guard)?;
    Ok(next)
}

pub(crate) fn pauli_increment(w: Complex64, h: &ComplexMatrix, dy: &[f64], dt: f64) -> Complex64 {
    let w2 = w * w;
    let drift = I * ((h[(0, 0)] + h[(0, 1)] * w) * w - (h[(1, 0)] + h[(1, 1)] * w));
    drift * dt + (1.0 - w2) * dy[0] + I * (1.0 + w2) * dy[1] - 2.0 * w * dy[2]
}

/// Fast path for the Pauli scheme on a qubit:
/// `dw = i[(h00 + h01 w) w - (h10 + h11 w)] dt + (1 - w^2) dY^1 + i(1 + w^2) dY^2 - 2w dY^3`.
pub fn step_pauli_qubit(w: Complex64, h: &ComplexMatrix, dy: &[f64], dt: f64) -> Result<Complex64> {
    check_dim(2, h.dim())?;
    check_dim(3, dy.len())?;
    let guard = ProjectiveState::DEFAULT_GUARD;
    if !(w.norm() <= guard) {
        return Err(Error::ChartExit { norm: w.norm(), guard });
    }
    let next = w + pauli_increment(w, h, dy, dt);
    if next.norm() <= guard {
        Ok(next)
    } else {
        Err(Error::ChartExit {
            norm: next.norm(),
            guard,
        })
    }
}

/// Innovation increments `dB^j = dY^j - <L_j + L_j*>_W dt`.
pub fn innovation_increment(
    scheme: &DetectionScheme,
    w: &ProjectiveState,
    dy: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    check_channels(scheme, dy)?;
    let means = super::channel_means(scheme, w)?;
    Ok(dy.iter().zip(means).map(|(y, m)| y - m * dt).collect())
}

/// Reduces an angle to `[0, 2 pi)`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = x.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Angle form of the torus scheme: `phi_k += (h00 - hkk) dt + r_k dY^k`, mod `2 pi`.
pub fn step_torus_angles(
    phi: &[f64],
    h: &ComplexMatrix,
    rates: &[f64],
    dy: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    check_dim(phi.len() + 1, h.dim())?;
    check_dim(phi.len(), rates.len())?;
    check_dim(phi.len(), dy.len())?;
    if !h.is_diagonal() {
        return Err(Error::SchemeMismatch(
            "angle form needs a diagonal Hamiltonian".into(),
        ));
    }
    let h00 = h[(0, 0)].re;
    Ok(phi
        .iter()
        .enumerate()
        .map(|(k, &p)| wrap_angle(p + (h00 - h[(k + 1, k + 1)].re) * dt + rates[k] * dy[k]))
        .collect())
}

/// Euclidean column scheme:
/// `dw_k = i[w_k(h00 + sum_l h0l w_l) - hk0 - sum_l hkl w_l] dt + n w_k dt + dY^k1 + i dY^k2`.
pub fn step_euclidean(
    w: &ProjectiveState,
    h: &ComplexMatrix,
    dy: &[f64],
    dt: f64,
) -> Result<ProjectiveState> {
    let n = w.n();
    check_dim(n + 1, h.dim())?;
    check_dim(2 * n, dy.len())?;
    let hw = h.apply(&w.lifted());
    let next = w
        .coords()
        .iter()
        .enumerate()
        .map(|(k, &wk)| {
            let drift = I * (wk * hw[0] - hw[k + 1]) + n as f64 * wk;
            wk + drift * dt + dy[2 * k] + I * dy[2 * k + 1]
        })
        .collect();
    ProjectiveState::new(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{gell_mann, sigma_x, sigma_z};
    use crate::rng::{fill_increments, path_rng};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_w(rng: &mut impl Rng, n: usize, radius: f64) -> ProjectiveState {
        ProjectiveState::new(
            (0..n)
                .map(|_| c(rng.random_range(-radius..radius), rng.random_range(-radius..radius)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn linear_chi_examples() {
        let scheme = DetectionScheme::custom(vec![sigma_z()]).unwrap();
        let chi = StateVector::from_real(&[1.0, 0.0]).unwrap();
        let next = step_linear_chi(&chi, &ComplexMatrix::zeros(2), &scheme, &[0.0], 0.01).unwrap();
        assert_eq!(next.components(), &[c(0.995, 0.0), c(0.0, 0.0)]);

        let s = 0.5f64.sqrt();
        let chi = StateVector::from_real(&[s, s]).unwrap();
        let empty = DetectionScheme::empty(2).unwrap();
        let next = step_linear_chi(&chi, &sigma_z(), &empty, &[], 0.1).unwrap();
        assert_eq!(next.components(), &[c(s, -0.1 * s), c(s, 0.1 * s)]);
    }

    #[test]
    fn projective_examples() {
        let p = DetectionScheme::pauli();
        let z = ComplexMatrix::zeros(2);
        let w = step_projective(&ProjectiveState::origin(1), &z, &p, &[0.01, 0.0, 0.0], 1e-4).unwrap();
        assert_eq!(w.coords(), &[c(0.01, 0.0)]);

        let big = ProjectiveState::new(vec![c(9e7, 0.0)]).unwrap();
        assert!(matches!(
            step_projective(&big, &z, &p, &[0.0, 0.0, -0.5], 1e-3),
            Err(Error::ChartExit { .. })
        ));
    }

    #[test]
    fn torus_projective_drift_reduces_to_uncoupled_form() {
        let rates = [1.0, 0.7];
        let scheme = DetectionScheme::torus_diagonal(&rates).unwrap();
        let h = ComplexMatrix::real_diagonal(&[0.3, -1.1, 2.0]).unwrap();
        let mut rng = path_rng(5, 0);
        for _ in 0..20 {
            let w = random_w(&mut rng, 2, 3.0);
            let co = projective_coefficients(&scheme, &h, &w, NoiseKind::Output).unwrap();
            for k in 0..2 {
                let wk = w.coords()[k];
                let hkk = h[(k + 1, k + 1)].re;
                let want = I * wk * (0.3 - hkk) - 0.5 * rates[k] * rates[k] * wk;
                assert!((co.drift[k] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn gell_mann_drift_vanishes() {
        let scheme = DetectionScheme::gell_mann(3).unwrap();
        let z = ComplexMatrix::zeros(3);
        let mut rng = path_rng(6, 0);
        for _ in 0..50 {
            let w = random_w(&mut rng, 2, 2.0);
            for kind in [NoiseKind::Output, NoiseKind::Innovation] {
                let co = projective_coefficients(&scheme, &z, &w, kind).unwrap();
                assert!(co.drift.iter().all(|d| d.norm() < 1e-12), "{:?}", co.drift);
            }
        }
        assert_eq!(scheme.couplings(), gell_mann(3).unwrap().as_slice());
    }

    #[test]
    fn pauli_fast_path_examples() {
        let z = ComplexMatrix::zeros(2);
        assert_eq!(step_pauli_qubit(c(0.0, 0.0), &z, &[0.0, 0.02, 0.0], 0.1).unwrap(), c(0.0, 0.02));
        assert_eq!(step_pauli_qubit(c(1.0, 0.0), &z, &[0.02, 0.0, 0.0], 0.1).unwrap(), c(1.0, 0.0));
        let w = c(0.5, 0.0);
        let dt = 1e-3;
        let got = step_pauli_qubit(w, &sigma_z(), &[0.0; 3], dt).unwrap();
        assert!((got - (w + I * 2.0 * w * dt)).norm() < 1e-16);
    }

    #[test]
    fn pauli_fast_path_agrees_with_general_stepper() {
        let p = DetectionScheme::pauli();
        let h = ComplexMatrix::new(2, vec![c(0.3, 0.0), c(0.2, -0.5), c(0.2, 0.5), c(-1.0, 0.0)]).unwrap();
        let mut rng = path_rng(9, 0);
        let mut dy = [0.0; 3];
        for _ in 0..200 {
            let w = random_w(&mut rng, 1, 2.0);
            fill_increments(&mut rng, 1e-3, &mut dy);
            let a = step_pauli_qubit(w.coords()[0], &h, &dy, 1e-3).unwrap();
            let b = step_projective(&w, &h, &p, &dy, 1e-3).unwrap();
            assert!((a - b.coords()[0]).norm() < 1e-14);
        }
    }

    #[test]
    fn innovation_examples() {
        let p = DetectionScheme::pauli();
        let dt = 0.01;
        let db = innovation_increment(&p, &ProjectiveState::origin(1), &[0.1, 0.2, 0.3], dt).unwrap();
        assert!((db[2] - (0.3 - 2.0 * dt)).abs() < 1e-16);
        assert_eq!(&db[..2], &[0.1, 0.2]);

        let t = DetectionScheme::torus_diagonal(&[1.0]).unwrap();
        let w = ProjectiveState::new(vec![c(0.3, 0.9)]).unwrap();
        assert_eq!(innovation_increment(&t, &w, &[0.05], dt).unwrap(), vec![0.05]);

        let x = DetectionScheme::custom(vec![sigma_x()]).unwrap();
        let w = ProjectiveState::new(vec![c(1.0, 0.0)]).unwrap();
        let db = innovation_increment(&x, &w, &[0.05], dt).unwrap();
        assert!((db[0] - (0.05 - 2.0 * dt)).abs() < 1e-16);
    }

    #[test]
    fn torus_angle_examples() {
        let h = ComplexMatrix::real_diagonal(&[2.0, 0.0]).unwrap();
        let phi = step_torus_angles(&[1.0], &h, &[1.0], &[0.0], 0.01).unwrap();
        assert!((phi[0] - 1.02).abs() < 1e-15);
        let wrapped = step_torus_angles(&[6.28], &h, &[1.0], &[0.01], 0.01).unwrap();
        assert!((0.0..TAU).contains(&wrapped[0]));
        assert!(matches!(
            step_torus_angles(&[0.0], &sigma_x(), &[1.0], &[0.0], 0.01),
            Err(Error::SchemeMismatch(_))
        ));
    }

    #[test]
    fn euclidean_examples_and_general_agreement() {
        let z = ComplexMatrix::zeros(3);
        let origin = ProjectiveState::origin(2);
        assert_eq!(step_euclidean(&origin, &z, &[0.0; 4], 0.1).unwrap(), origin);
        let w = ProjectiveState::new(vec![c(0.5, -1.0), c(2.0, 0.25)]).unwrap();
        let next = step_euclidean(&w, &z, &[0.0; 4], 0.1).unwrap();
        for (a, b) in next.coords().iter().zip(w.coords()) {
            assert!((a - b * 1.2).norm() < 1e-15);
        }

        let scheme = DetectionScheme::euclidean(2).unwrap();
        let h = ComplexMatrix::new(
            3,
            vec![
                c(1.0, 0.0), c(0.2, 0.1), c(0.0, -0.3),
                c(0.2, -0.1), c(-0.5, 0.0), c(0.4, 0.0),
                c(0.0, 0.3), c(0.4, 0.0), c(0.7, 0.0),
            ],
        )
        .unwrap();
        let dy = [0.01, -0.02, 0.03, 0.005];
        let a = step_euclidean(&w, &h, &dy, 1e-3).unwrap();
        let b = step_projective(&w, &h, &scheme, &dy, 1e-3).unwrap();
        for (x, y) in a.coords().iter().zip(b.coords()) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
