use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use super::coefficients::{coefficients_dd, local_coefficients};
use super::dd::{Cdd, Dd};
use super::{check_isothermal, IsothermalReport};
use crate::error::{check_dim, Error, Result};
use crate::filtering::{DetectionScheme, NoiseKind, SchemeKind};
use crate::quantum::{ComplexMatrix, ProjectiveState};
use crate::rng::path_rng;

const KINDS: [NoiseKind; 2] = [NoiseKind::Output, NoiseKind::Innovation];

fn max_abs(xs: impl IntoIterator<Item = Dd>) -> f64 {
    xs.into_iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max)
}

/// Residual of the sphere identification at `w` for the Pauli scheme with `H = 0`:
/// the larger of `max |drift|` and `max_ij |QV_ij - (1 + x^2 + y^2)^2 delta_ij|`,
/// maximized over both noise conventions.
pub fn verify_sphere_generator(w: Complex64) -> Result<f64> {
    let scheme = DetectionScheme::pauli();
    let point = ProjectiveState::new(vec![w])?;
    let zero = ComplexMatrix::zeros(2);
    let one = Dd::from(1.0);
    let r2 = Dd::from(w.re) * Dd::from(w.re) + Dd::from(w.im) * Dd::from(w.im);
    let target = (one + r2) * (one + r2);
    let mut residual: f64 = 0.0;
    for kind in KINDS {
        let co = coefficients_dd(&scheme, &zero, &point, kind)?;
        residual = residual.max(max_abs(co.real_drift()));
        let qv = co.real_qv();
        for (a, row) in qv.iter().enumerate() {
            for (b, &q) in row.iter().enumerate() {
                let want = if a == b { target } else { Dd::ZERO };
                residual = residual.max((q - want).abs().to_f64());
            }
        }
    }
    Ok(residual)
}

/// Complex coefficients `a_kl = 2 (1 + |w|^2)(delta_kl + w_k conj(w_l))` of twice the
/// second-order part of the Laplace–Beltrami operator on the complex projective space,
/// written as `sum_kl a_kl d_k dbar_l`.
pub fn projective_diffusion_target(w: &ProjectiveState) -> DMatrix<Complex64> {
    let n = w.n();
    let c: Vec<Cdd> = w.coords().iter().map(|&z| Cdd::from(z)).collect();
    let s = c.iter().fold(Dd::from(1.0), |acc, z| acc + z.norm_sqr());
    let two_s = s + s;
    DMatrix::from_fn(n, n, |k, l| {
        let mut m = c[k] * c[l].conj();
        if k == l {
            m.re = m.re + Dd::from(1.0);
        }
        m.scale(two_s).to_c64()
    })
}

/// Diagnostic comparison of the Gell-Mann scheme on `C^3` against the projective
/// Laplacian at a point of the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveGeneratorReport {
    /// `max |drift|` over both noise conventions with `H = 0`.
    pub drift_residual: f64,
    /// Largest difference between output-form and innovation-form coefficients.
    pub kind_disagreement: f64,
    /// SDE-derived `a_kl` (ground truth).
    pub sde_coefficients: DMatrix<Complex64>,
    /// Largest `|b_kl|`; the displayed operator has no holomorphic second derivatives.
    pub holomorphic_residual: f64,
    /// `max_kl |a_kl - 2 Delta_pro_kl|` against the displayed operator.
    pub discrepancy: f64,
}

impl ProjectiveGeneratorReport {
    pub fn max_residual(&self) -> f64 {
        self.drift_residual
            .max(self.kind_disagreement)
            .max(self.holomorphic_residual)
            .max(self.discrepancy)
    }
}

/// Compares the qutrit Gell-Mann scheme with `H = 0` at `w = (w_1, w_2)` with twice the
/// projective Laplacian.
pub fn verify_projective_generator(w: &ProjectiveState) -> Result<ProjectiveGeneratorReport> {
    check_dim(2, w.n())?;
    let scheme = DetectionScheme::gell_mann(3)?;
    let zero = ComplexMatrix::zeros(3);
    let out = coefficients_dd(&scheme, &zero, w, NoiseKind::Output)?;
    let inn = coefficients_dd(&scheme, &zero, w, NoiseKind::Innovation)?;
    let drift_residual = max_abs(out.real_drift()).max(max_abs(inn.real_drift()));
    let kind_disagreement = max_abs(
        out.real_drift()
            .into_iter()
            .zip(inn.real_drift())
            .map(|(a, b)| a - b),
    );
    let (a, b) = out.complex_ab();
    let target = projective_diffusion_target(w);
    let sde = DMatrix::from_fn(2, 2, |k, l| a[k][l].to_c64());
    let holomorphic_residual = b
        .iter()
        .flatten()
        .map(|z| z.to_c64().norm())
        .fold(0.0, f64::max);
    let discrepancy = sde
        .iter()
        .zip(target.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    Ok(ProjectiveGeneratorReport {
        drift_residual,
        kind_disagreement,
        sde_coefficients: sde,
        holomorphic_residual,
        discrepancy,
    })
}

/// True iff output-form and innovation-form coefficients agree to `1e-12` at `w`.
pub fn innovation_invariance_check(
    scheme: &DetectionScheme,
    h: &ComplexMatrix,
    w: &ProjectiveState,
) -> Result<bool> {
    let a = coefficients_dd(scheme, h, w, NoiseKind::Output)?;
    let b = coefficients_dd(scheme, h, w, NoiseKind::Innovation)?;
    let diff = max_abs(
        a.real_drift()
            .into_iter()
            .zip(b.real_drift())
            .map(|(x, y)| x - y),
    );
    // The noise rows, hence the quadratic variation, do not depend on the convention.
    Ok(diff < 1e-12)
}

/// Uniform sample of the ball `|w| <= radius` in `C^n`.
pub fn sample_chart_point(rng: &mut impl Rng, n: usize, radius: f64) -> ProjectiveState {
    loop {
        let coords: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::new(
                    rng.random_range(-radius..=radius),
                    rng.random_range(-radius..=radius),
                )
            })
            .collect();
        let w = ProjectiveState::new(coords).expect("finite sample");
        if w.norm() <= radius {
            return w;
        }
    }
}

/// Summary of a randomized sweep of a scheme's coefficients with `H = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeReport {
    pub scheme: String,
    pub points_tested: usize,
    pub radius: f64,
    /// `max |drift - expected drift|` over points and both noise conventions.
    pub max_drift_residual: f64,
    /// `max |QV - expected QV|` against the scheme's closed form.
    pub max_variance_residual: f64,
    /// Output/innovation invariance at every point.
    pub innovation_invariant: bool,
    /// Isothermality verdict for three-channel qubit schemes.
    pub isothermal: Option<IsothermalReport>,
}

/// Expected `(drift, QV)` in real coordinates for the named scheme families with `H = 0`;
/// `None` for custom schemes. The drift is the output-form one.
fn expected_coefficients(scheme: &DetectionScheme, w: &ProjectiveState) -> Option<(Vec<f64>, DMatrix<f64>)> {
    let n = w.n();
    let xy = w.to_real();
    match scheme.kind() {
        SchemeKind::PauliSphere | SchemeKind::GellMannProjective => {
            // Real form of a_kl: QV = Re/Im blocks of a/2 (b = 0).
            let a = projective_diffusion_target(w);
            let qv = DMatrix::from_fn(2 * n, 2 * n, |p, q| {
                let z = a[(p / 2, q / 2)] * 0.5;
                match (p % 2, q % 2) {
                    (0, 0) | (1, 1) => z.re,
                    (0, 1) => -z.im,
                    _ => z.im,
                }
            });
            Some((vec![0.0; 2 * n], qv))
        }
        SchemeKind::TorusDiagonal => {
            let rates = scheme.torus_rates()?;
            let mut drift = vec![0.0; 2 * n];
            let mut qv = DMatrix::zeros(2 * n, 2 * n);
            for k in 0..n {
                let (x, y, r2) = (xy[2 * k], xy[2 * k + 1], rates[k] * rates[k]);
                drift[2 * k] = -0.5 * r2 * x;
                drift[2 * k + 1] = -0.5 * r2 * y;
                qv[(2 * k, 2 * k)] = r2 * y * y;
                qv[(2 * k, 2 * k + 1)] = -r2 * x * y;
                qv[(2 * k + 1, 2 * k)] = -r2 * x * y;
                qv[(2 * k + 1, 2 * k + 1)] = r2 * x * x;
            }
            Some((drift, qv))
        }
        SchemeKind::EuclideanColumn => Some((
            xy.iter().map(|v| n as f64 * v).collect(),
            DMatrix::identity(2 * n, 2 * n),
        )),
        SchemeKind::Custom => None,
    }
}

/// Sweeps `points` uniform chart points in the ball of radius `radius` (stream `seed`).
pub fn analyze_scheme(
    scheme: &DetectionScheme,
    points: usize,
    radius: f64,
    seed: u64,
) -> Result<SchemeReport> {
    if scheme.channels() == 0 {
        return Err(Error::domain("scheme without couplings"));
    }
    let n = scheme.dim() - 1;
    let zero = ComplexMatrix::zeros(scheme.dim());
    let mut rng = path_rng(seed, 0);
    let mut max_drift: f64 = 0.0;
    let mut max_var: f64 = 0.0;
    let mut invariant = true;
    for _ in 0..points {
        let w = sample_chart_point(&mut rng, n, radius);
        let expected = expected_coefficients(scheme, &w);
        invariant &= innovation_invariance_check(scheme, &zero, &w)?;
        for kind in KINDS {
            let lc = local_coefficients(scheme, &zero, &w, kind)?;
            match &expected {
                Some((drift, qv)) => {
                    if kind == NoiseKind::Output || invariant {
                        let d = lc.drift.iter().zip(drift).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        max_drift = max_drift.max(d);
                    }
                    let v = (&lc.quadratic_variation - qv).amax();
                    max_var = max_var.max(v);
                }
                None => {
                    max_drift = max_drift.max(lc.drift.iter().map(|d| d.abs()).fold(0.0, f64::max));
                    max_var = f64::NAN;
                }
            }
        }
    }
    let isothermal = (scheme.dim() == 2 && scheme.channels() == 3)
        .then(|| check_isothermal(scheme.couplings()))
        .transpose()?;
    let name = match scheme.kind() {
        SchemeKind::PauliSphere => "pauli".to_string(),
        SchemeKind::GellMannProjective => format!("gell-mann-{}", scheme.dim()),
        SchemeKind::TorusDiagonal => format!("torus-{n}"),
        SchemeKind::EuclideanColumn => format!("euclidean-{n}"),
        SchemeKind::Custom => "custom".to_string(),
    };
    Ok(SchemeReport {
        scheme: name,
        points_tested: points,
        radius,
        max_drift_residual: max_drift,
        max_variance_residual: max_var,
        innovation_invariant: invariant,
        isothermal,
    })
}
