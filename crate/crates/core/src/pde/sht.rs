//! Spherical-harmonic transform on a Gaussian grid.
//!
//! Latitudes are the `lmax + 1` Gauss–Legendre nodes (ordered north to south), longitudes
//! the `2 lmax + 2` equispaced angles. Real fields are represented by the coefficients
//! `c_lm`, `0 <= m <= l <= lmax`, of
//!
//! ```text
//! f(theta, phi) = sum_l [ c_l0 P_l^0 + 2 Re sum_{m >= 1} c_lm P_l^m e^{i m phi} ]
//! ```
//!
//! with `P_l^m(cos theta)` normalized to unit `L^2` norm on `[-1, 1]`, so the transform pair
//! is exact for band-limited fields.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) fn tri(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Gauss–Legendre nodes (descending) and weights on `[-1, 1]`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Normalized associated Legendre values `P_l^m(mu)` for `l <= lmax`, at `mu = cos theta`,
/// `s = sin theta`, stored at `tri(l, m)`.
pub(crate) fn legendre(lmax: usize, mu: f64, s: f64, out: &mut [f64]) {
    let mut pmm = 1.0 / 2f64.sqrt();
    for m in 0..=lmax {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
        }
        out[tri(m, m)] = pmm;
        if m == lmax {
            break;
        }
        let mut p_prev = pmm;
        let mut p = (2.0 * m as f64 + 3.0).sqrt() * mu * pmm;
        out[tri(m + 1, m)] = p;
        for l in m + 2..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
            let next = a * (mu * p - b * p_prev);
            p_prev = p;
            p = next;
            out[tri(l, m)] = p;
        }
    }
}

/// `d/dtheta P_l^m` for `l <= lmax` from a table holding degrees up to `lmax + 1`.
pub(crate) fn legendre_dtheta(lmax: usize, mu: f64, s: f64, p: &[f64], out: &mut [f64]) {
    for m in 0..=lmax {
        for l in m..=lmax {
            let (lf, mf) = (l as f64, m as f64);
            let e = ((2.0 * lf + 1.0) / (2.0 * lf + 3.0) * (lf + mf + 1.0) * (lf - mf + 1.0)).sqrt();
            out[tri(l, m)] = -((lf + 1.0) * mu * p[tri(l, m)] - e * p[tri(l + 1, m)]) / s;
        }
    }
}

pub(crate) struct Sht {
    pub lmax: usize,
    pub nlat: usize,
    pub nlon: usize,
    pub theta: Vec<f64>,
    pub weights: Vec<f64>,
    ncoef: usize,
    /// `P_l^m` at the latitudes, `[tri(l, m) * nlat + i]`, `l <= lmax`.
    p: Vec<f64>,
    /// `d/dtheta P_l^m` at the latitudes, same layout.
    dp: Vec<f64>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Sht {
    pub fn new(lmax: usize) -> Self {
        let nlat = lmax + 1;
        let nlon = 2 * lmax + 2;
        let (mu, weights) = gauss_legendre(nlat);
        let theta: Vec<f64> = mu.iter().map(|m| m.acos()).collect();
        let sin_theta: Vec<f64> = theta.iter().map(|t| t.sin()).collect();
        let ncoef = tri(lmax, lmax) + 1;
        let mut p = vec![0.0; ncoef * nlat];
        let mut dp = vec![0.0; ncoef * nlat];
        let mut col = vec![0.0; tri(lmax + 1, lmax + 1) + 1];
        let mut dcol = vec![0.0; ncoef];
        for i in 0..nlat {
            legendre(lmax + 1, mu[i], sin_theta[i], &mut col);
            legendre_dtheta(lmax, mu[i], sin_theta[i], &col, &mut dcol);
            for k in 0..ncoef {
                p[k * nlat + i] = col[k];
                dp[k * nlat + i] = dcol[k];
            }
        }
        let mut planner = FftPlanner::new();
        Self {
            lmax,
            nlat,
            nlon,
            theta,
            weights,
            ncoef,
            p,
            dp,
            fwd: planner.plan_fft_forward(nlon),
            inv: planner.plan_fft_inverse(nlon),
        }
    }

    pub fn ncoef(&self) -> usize {
        self.ncoef
    }

    pub fn analysis(&self, values: &[f64]) -> Vec<Complex64> {
        let (nlat, nlon, lmax) = (self.nlat, self.nlon, self.lmax);
        let mut coef = vec![Complex64::new(0.0, 0.0); self.ncoef];
        let mut buf = vec![Complex64::new(0.0, 0.0); nlon];
        let scale = 1.0 / nlon as f64;
        for i in 0..nlat {
            for (b, v) in buf.iter_mut().zip(&values[i * nlon..(i + 1) * nlon]) {
                *b = Complex64::new(*v, 0.0);
            }
            self.fwd.process(&mut buf);
            let wi = self.weights[i] * scale;
            for m in 0..=lmax {
                let g = buf[m] * wi;
                for l in m..=lmax {
                    let k = tri(l, m);
                    coef[k] += g * self.p[k * nlat + i];
                }
            }
        }
        coef
    }

    fn synthesis_with(&self, coef: &[Complex64], table: &[f64], dphi: bool) -> Vec<f64> {
        let (nlat, nlon, lmax) = (self.nlat, self.nlon, self.lmax);
        let mut out = vec![0.0; nlat * nlon];
        let mut buf = vec![Complex64::new(0.0, 0.0); nlon];
        for i in 0..nlat {
            buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
            for m in 0..=lmax {
                let mut g = Complex64::new(0.0, 0.0);
                for l in m..=lmax {
                    let k = tri(l, m);
                    g += coef[k] * table[k * nlat + i];
                }
                if dphi {
                    g *= Complex64::new(0.0, m as f64);
                }
                if m == 0 {
                    buf[0] = Complex64::new(g.re, 0.0);
                } else {
                    buf[m] = g;
                    buf[nlon - m] = g.conj();
                }
            }
            self.inv.process(&mut buf);
            for (o, b) in out[i * nlon..(i + 1) * nlon].iter_mut().zip(&buf) {
                *o = b.re;
            }
        }
        out
    }

    pub fn synthesis(&self, coef: &[Complex64]) -> Vec<f64> {
        self.synthesis_with(coef, &self.p, false)
    }

    pub fn synthesis_dtheta(&self, coef: &[Complex64]) -> Vec<f64> {
        self.synthesis_with(coef, &self.dp, false)
    }

    pub fn synthesis_dphi(&self, coef: &[Complex64]) -> Vec<f64> {
        self.synthesis_with(coef, &self.p, true)
    }

    /// Value and `(d/dtheta, d/dphi)` at an arbitrary point, by direct summation.
    pub fn evaluate(&self, coef: &[Complex64], theta: f64, phi: f64) -> (f64, [f64; 2]) {
        let lmax = self.lmax;
        let (mu, s) = (theta.cos(), theta.sin());
        let mut col = vec![0.0; tri(lmax + 1, lmax + 1) + 1];
        legendre(lmax + 1, mu, s, &mut col);
        let mut dcol = vec![0.0; self.ncoef];
        let pole = s.abs() < 1e-12;
        if !pole {
            legendre_dtheta(lmax, mu, s, &col, &mut dcol);
        }
        let (mut f, mut ft, mut fp) = (0.0, 0.0, 0.0);
        for m in 0..=lmax {
            let e = Complex64::from_polar(1.0, m as f64 * phi);
            let w = if m == 0 { 1.0 } else { 2.0 };
            for l in m..=lmax {
                let k = tri(l, m);
                let z = coef[k] * e;
                f += w * z.re * col[k];
                ft += w * z.re * dcol[k];
                fp += w * (z * Complex64::new(0.0, m as f64)).re * col[k];
            }
        }
        if pole {
            // Derivative through the pole along the meridian phi.
            let eps = 1e-6;
            let (a, _) = self.evaluate(coef, eps, phi);
            let (b, _) = self.evaluate(coef, eps, phi + PI);
            let sign = if mu > 0.0 { 1.0 } else { -1.0 };
            ft = sign * (a - b) / (2.0 * eps);
        }
        (f, [ft, fp])
    }
}
