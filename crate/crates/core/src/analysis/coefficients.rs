use nalgebra::DMatrix;
use num_complex::Complex64;

use super::dd::{Cdd, Dd};
use crate::error::{check_dim, Result};
use crate::filtering::{DetectionScheme, NoiseKind};
use crate::quantum::{ComplexMatrix, ProjectiveState};

/// Drift and quadratic variation of the filtered diffusion in real chart coordinates
/// `(x_1, y_1, ..., x_n, y_n)`. The generator is
/// `drift . grad + 1/2 sum_ij quadratic_variation_ij d_i d_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCoefficients {
    pub drift: Vec<f64>,
    pub quadratic_variation: DMatrix<f64>,
    pub noise_kind: NoiseKind,
}

impl LocalCoefficients {
    /// Generator applied to a function with the given gradient and Hessian.
    pub fn generator(&self, grad: &[f64], hessian: &DMatrix<f64>) -> f64 {
        let first: f64 = self.drift.iter().zip(grad).map(|(a, b)| a * b).sum();
        let second: f64 = self
            .quadratic_variation
            .iter()
            .zip(hessian.iter())
            .map(|(a, b)| a * b)
            .sum();
        first + 0.5 * second
    }
}

/// Complex form of the second-order part: the generator contains
/// `sum_kl a_kl d_k dbar_l + 1/2 sum_kl (b_kl d_k d_l + conj)`, with
/// `a_kl = sum_j s_jk conj(s_jl)` and `b_kl = sum_j s_jk s_jl` for complex noise rows `s_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexDiffusion {
    pub a: DMatrix<Complex64>,
    pub b: DMatrix<Complex64>,
}

pub(crate) struct DdCoefficients {
    pub drift: Vec<Cdd>,
    pub noise: Vec<Vec<Cdd>>,
}

fn apply(m: &ComplexMatrix, v: &[Cdd]) -> Vec<Cdd> {
    let n = m.dim();
    (0..n)
        .map(|r| {
            (0..n).fold(Cdd::ZERO, |acc, c| {
                let e = m[(r, c)];
                if e.re == 0.0 && e.im == 0.0 {
                    acc
                } else {
                    acc + Cdd::from(e) * v[c]
                }
            })
        })
        .collect()
}

pub(crate) fn coefficients_dd(
    scheme: &DetectionScheme,
    h: &ComplexMatrix,
    w: &ProjectiveState,
    kind: NoiseKind,
) -> Result<DdCoefficients> {
    check_dim(h.dim(), w.n() + 1)?;
    if scheme.channels() > 0 {
        check_dim(scheme.dim(), w.n() + 1)?;
    }
    w.check_guard(ProjectiveState::DEFAULT_GUARD)?;
    let big_w: Vec<Cdd> = w.lifted().into_iter().map(Cdd::from).collect();
    let coords = &big_w[1..];
    let i = Cdd {
        re: Dd::ZERO,
        im: Dd::from(1.0),
    };
    let half = Dd::from(0.5);
    let norm = big_w.iter().fold(Dd::ZERO, |acc, z| acc + z.norm_sqr());

    let hw = apply(h, &big_w);
    let mut drift: Vec<Cdd> = coords
        .iter()
        .enumerate()
        .map(|(k, &wk)| i * (wk * hw[0] - hw[k + 1]))
        .collect();
    let mut noise = Vec::with_capacity(scheme.channels());
    for l in scheme.couplings() {
        let lw = apply(l, &big_w);
        let llw = apply(&l.adjoint(), &lw);
        let row: Vec<Cdd> = coords
            .iter()
            .enumerate()
            .map(|(k, &wk)| lw[k + 1] - wk * lw[0])
            .collect();
        for (k, &wk) in coords.iter().enumerate() {
            drift[k] = drift[k]
                + (wk * llw[0] - llw[k + 1]).scale(half)
                + wk * lw[0] * lw[0]
                - lw[0] * lw[k + 1];
        }
        if kind == NoiseKind::Innovation {
            let inner = big_w
                .iter()
                .zip(&lw)
                .fold(Dd::ZERO, |acc, (a, b)| acc + (a.conj() * *b).re);
            let mean = (inner + inner).div(norm);
            for (d, s) in drift.iter_mut().zip(&row) {
                *d = *d + s.scale(mean);
            }
        }
        noise.push(row);
    }
    Ok(DdCoefficients { drift, noise })
}

impl DdCoefficients {
    pub(crate) fn real_drift(&self) -> Vec<Dd> {
        self.drift.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    pub(crate) fn real_qv(&self) -> Vec<Vec<Dd>> {
        let m = 2 * self.drift.len();
        let mut qv = vec![vec![Dd::ZERO; m]; m];
        for row in &self.noise {
            let s: Vec<Dd> = row.iter().flat_map(|z| [z.re, z.im]).collect();
            for a in 0..m {
                for b in 0..m {
                    qv[a][b] = qv[a][b] + s[a] * s[b];
                }
            }
        }
        qv
    }

    /// `(a, b)` of the complex form.
    pub(crate) fn complex_ab(&self) -> (Vec<Vec<Cdd>>, Vec<Vec<Cdd>>) {
        let n = self.drift.len();
        let mut a = vec![vec![Cdd::ZERO; n]; n];
        let mut b = vec![vec![Cdd::ZERO; n]; n];
        for row in &self.noise {
            for k in 0..n {
                for l in 0..n {
                    a[k][l] = a[k][l] + row[k] * row[l].conj();
                    b[k][l] = b[k][l] + row[k] * row[l];
                }
            }
        }
        (a, b)
    }
}

/// Drift and quadratic variation at `w`.
///
/// Errors with a chart exit if `|w|` exceeds the default guard.
pub fn local_coefficients(
    scheme: &DetectionScheme,
    h: &ComplexMatrix,
    w: &ProjectiveState,
    kind: NoiseKind,
) -> Result<LocalCoefficients> {
    let co = coefficients_dd(scheme, h, w, kind)?;
    let qv = co.real_qv();
    let m = qv.len();
    Ok(LocalCoefficients {
        drift: co.real_drift().into_iter().map(Dd::to_f64).collect(),
        quadratic_variation: DMatrix::from_fn(m, m, |a, b| qv[a][b].to_f64()),
        noise_kind: kind,
    })
}

/// Complex-form second-order coefficients at `w` (independent of the noise kind).
pub fn complex_diffusion(
    scheme: &DetectionScheme,
    h: &ComplexMatrix,
    w: &ProjectiveState,
) -> Result<ComplexDiffusion> {
    let co = coefficients_dd(scheme, h, w, NoiseKind::Output)?;
    let (a, b) = co.complex_ab();
    let n = a.len();
    Ok(ComplexDiffusion {
        a: DMatrix::from_fn(n, n, |k, l| a[k][l].to_c64()),
        b: DMatrix::from_fn(n, n, |k, l| b[k][l].to_c64()),
    })
}
