use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::sht::{tri, Sht};
use crate::{Error, Result};

/// Manifold and resolution of a grid.
///
/// Node coordinates are `[phi, 0]` on the circle, `[phi1, phi2]` on the torus and
/// `[theta, phi]` (colatitude, longitude) on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manifold {
    Circle { n: usize },
    Torus2 { n: usize },
    /// Gaussian grid with `lmax + 1` latitudes and `2 lmax + 2` longitudes.
    Sphere2 { lmax: usize },
}

pub(crate) struct Ops {
    nodes: Vec<[f64; 2]>,
    /// Eigenvalue of `-Delta` for each spectral index.
    eigen: Vec<f64>,
    fft: Option<(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>,
    pub(crate) sht: Option<Sht>,
}

/// A discretised manifold together with the diffusion scale `kappa` of the generator
/// `kappa * Delta_LB`. Cloning is cheap; transform tables are shared.
#[derive(Clone)]
pub struct ManifoldGrid {
    manifold: Manifold,
    kappa: f64,
    ops: Arc<Ops>,
}

impl fmt::Debug for ManifoldGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ManifoldGrid")
            .field("manifold", &self.manifold)
            .field("kappa", &self.kappa)
            .finish()
    }
}

impl PartialEq for ManifoldGrid {
    fn eq(&self, other: &Self) -> bool {
        self.manifold == other.manifold && self.kappa == other.kappa
    }
}

fn signed_freq(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("diffusion scale must be positive, got {kappa}")))
    }
}

impl ManifoldGrid {
    pub fn new(manifold: Manifold, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        let ops = match manifold {
            Manifold::Circle { n } => {
                if n < 4 || n % 2 != 0 {
                    return Err(Error::domain(format!("circle needs an even node count >= 4, got {n}")));
                }
                let nodes = (0..n).map(|j| [TAU * j as f64 / n as f64, 0.0]).collect();
                let eigen = (0..n).map(|k| (signed_freq(k, n) as f64).powi(2)).collect();
                let mut p = FftPlanner::new();
                Ops { nodes, eigen, fft: Some((p.plan_fft_forward(n), p.plan_fft_inverse(n))), sht: None }
            }
            Manifold::Torus2 { n } => {
                if n < 4 || n % 2 != 0 {
                    return Err(Error::domain(format!("torus needs an even node count >= 4, got {n}")));
                }
                let h = TAU / n as f64;
                let nodes = (0..n * n).map(|k| [h * (k / n) as f64, h * (k % n) as f64]).collect();
                let eigen = (0..n * n)
                    .map(|k| {
                        let (a, b) = (signed_freq(k / n, n) as f64, signed_freq(k % n, n) as f64);
                        a * a + b * b
                    })
                    .collect();
                let mut p = FftPlanner::new();
                Ops { nodes, eigen, fft: Some((p.plan_fft_forward(n), p.plan_fft_inverse(n))), sht: None }
            }
            Manifold::Sphere2 { lmax } => {
                if lmax < 2 {
                    return Err(Error::domain(format!("sphere needs lmax >= 2, got {lmax}")));
                }
                let sht = Sht::new(lmax);
                let mut nodes = Vec::with_capacity(sht.nlat * sht.nlon);
                for &t in &sht.theta {
                    for j in 0..sht.nlon {
                        nodes.push([t, TAU * j as f64 / sht.nlon as f64]);
                    }
                }
                let mut eigen = vec![0.0; sht.ncoef()];
                for l in 0..=lmax {
                    for m in 0..=l {
                        eigen[tri(l, m)] = (l * (l + 1)) as f64;
                    }
                }
                Ops { nodes, eigen, fft: None, sht: Some(sht) }
            }
        };
        Ok(Self { manifold, kappa, ops: Arc::new(ops) })
    }

    pub fn circle(n: usize, kappa: f64) -> Result<Self> {
        Self::new(Manifold::Circle { n }, kappa)
    }

    pub fn torus(n: usize, kappa: f64) -> Result<Self> {
        Self::new(Manifold::Torus2 { n }, kappa)
    }

    pub fn sphere(lmax: usize, kappa: f64) -> Result<Self> {
        Self::new(Manifold::Sphere2 { lmax }, kappa)
    }

    /// Same nodes and tables, different diffusion scale.
    pub fn with_kappa(&self, kappa: f64) -> Result<Self> {
        check_kappa(kappa)?;
        Ok(Self { manifold: self.manifold, kappa, ops: self.ops.clone() })
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.ops.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.ops.nodes
    }

    /// `(rows, columns)` of the node array; rows are latitudes on the sphere.
    pub fn shape(&self) -> (usize, usize) {
        match self.manifold {
            Manifold::Circle { n } => (1, n),
            Manifold::Torus2 { n } => (n, n),
            Manifold::Sphere2 { lmax } => (lmax + 1, 2 * lmax + 2),
        }
    }

    /// Riemannian norm of a covector at a point.
    pub fn metric_norm(&self, x: [f64; 2], p: [f64; 2]) -> f64 {
        match self.manifold {
            Manifold::Circle { .. } => p[0].abs(),
            Manifold::Torus2 { .. } => p[0].hypot(p[1]),
            Manifold::Sphere2 { .. } => p[0].hypot(p[1] / x[0].sin()),
        }
    }

    pub(crate) fn sht(&self) -> Option<&Sht> {
        self.ops.sht.as_ref()
    }

    pub(crate) fn eigenvalues(&self) -> &[f64] {
        &self.ops.eigen
    }

    pub(crate) fn same_nodes(&self, other: &ManifoldGrid) -> bool {
        self.manifold == other.manifold
    }

    /// Spectral multiplier `exp(-(kappa lambda_k + discount) t)`.
    pub(crate) fn heat_multiplier(&self, t: f64, discount: f64) -> Vec<f64> {
        self.ops.eigen.iter().map(|l| (-(self.kappa * l + discount) * t).exp()).collect()
    }

    fn fft_pair(&self) -> &(Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
        self.ops.fft.as_ref().expect("flat grid")
    }

    fn fft2(&self, n: usize, data: &mut [Complex64], inverse: bool) {
        let (fwd, inv) = self.fft_pair();
        let plan = if inverse { inv } else { fwd };
        plan.process(data);
        let mut t = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                t[j * n + i] = data[i * n + j];
            }
        }
        plan.process(&mut t);
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = t[j * n + i];
            }
        }
    }

    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        match self.manifold {
            Manifold::Circle { n } => {
                let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
                self.fft_pair().0.process(&mut buf);
                buf.iter_mut().for_each(|c| *c /= n as f64);
                buf
            }
            Manifold::Torus2 { n } => {
                let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
                self.fft2(n, &mut buf, false);
                buf.iter_mut().for_each(|c| *c /= (n * n) as f64);
                buf
            }
            Manifold::Sphere2 { .. } => self.sht().unwrap().analysis(values),
        }
    }

    pub(crate) fn inverse(&self, coef: &[Complex64]) -> Vec<f64> {
        match self.manifold {
            Manifold::Circle { .. } => {
                let mut buf = coef.to_vec();
                self.fft_pair().1.process(&mut buf);
                buf.iter().map(|c| c.re).collect()
            }
            Manifold::Torus2 { n } => {
                let mut buf = coef.to_vec();
                self.fft2(n, &mut buf, true);
                buf.iter().map(|c| c.re).collect()
            }
            Manifold::Sphere2 { .. } => self.sht().unwrap().synthesis(coef),
        }
    }

    /// Nodal coordinate gradient `[d/dx0, d/dx1]` of the field with the given coefficients.
    pub(crate) fn gradient(&self, coef: &[Complex64]) -> Vec<[f64; 2]> {
        match self.manifold {
            Manifold::Circle { n } => {
                let d: Vec<Complex64> = coef
                    .iter()
                    .enumerate()
                    .map(|(k, c)| if k == n / 2 { Complex64::new(0.0, 0.0) } else { c * Complex64::new(0.0, signed_freq(k, n) as f64) })
                    .collect();
                self.inverse(&d).into_iter().map(|v| [v, 0.0]).collect()
            }
            Manifold::Torus2 { n } => {
                let deriv = |axis: usize| {
                    let d: Vec<Complex64> = coef
                        .iter()
                        .enumerate()
                        .map(|(k, c)| {
                            let idx = if axis == 0 { k / n } else { k % n };
                            if idx == n / 2 {
                                Complex64::new(0.0, 0.0)
                            } else {
                                c * Complex64::new(0.0, signed_freq(idx, n) as f64)
                            }
                        })
                        .collect();
                    self.inverse(&d)
                };
                let (a, b) = (deriv(0), deriv(1));
                a.into_iter().zip(b).map(|(a, b)| [a, b]).collect()
            }
            Manifold::Sphere2 { .. } => {
                let sht = self.sht().unwrap();
                let a = sht.synthesis_dtheta(coef);
                let b = sht.synthesis_dphi(coef);
                a.into_iter().zip(b).map(|(a, b)| [a, b]).collect()
            }
        }
    }

    /// Value and coordinate gradient at an arbitrary point.
    pub(crate) fn evaluate(&self, coef: &[Complex64], x: [f64; 2]) -> (f64, [f64; 2]) {
        match self.manifold {
            Manifold::Circle { n } => {
                let (mut f, mut g) = (0.0, 0.0);
                for (k, c) in coef.iter().enumerate() {
                    let kf = signed_freq(k, n) as f64;
                    let z = c * Complex64::from_polar(1.0, kf * x[0]);
                    f += z.re;
                    if k != n / 2 {
                        g -= kf * z.im;
                    }
                }
                (f, [g, 0.0])
            }
            Manifold::Torus2 { n } => {
                let (mut f, mut g0, mut g1) = (0.0, 0.0, 0.0);
                for (k, c) in coef.iter().enumerate() {
                    let (i, j) = (k / n, k % n);
                    let (a, b) = (signed_freq(i, n) as f64, signed_freq(j, n) as f64);
                    let z = c * Complex64::from_polar(1.0, a * x[0] + b * x[1]);
                    f += z.re;
                    if i != n / 2 {
                        g0 -= a * z.im;
                    }
                    if j != n / 2 {
                        g1 -= b * z.im;
                    }
                }
                (f, [g0, g1])
            }
            Manifold::Sphere2 { .. } => self.sht().unwrap().evaluate(coef, x[0], x[1]),
        }
    }
}

/// Real values on the nodes of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: ManifoldGrid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: &ManifoldGrid, values: Vec<f64>) -> Result<Self> {
        crate::error::check_dim(grid.len(), values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("grid function has non-finite values"));
        }
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &ManifoldGrid, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().iter().map(|x| f(*x)).collect())
    }

    pub fn constant(grid: &ManifoldGrid, c: f64) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    pub fn from_spectral(grid: &ManifoldGrid, coef: &[Complex64]) -> Result<Self> {
        crate::error::check_dim(grid.eigenvalues().len(), coef.len())?;
        Self::new(grid, grid.inverse(coef))
    }

    pub(crate) fn from_raw(grid: &ManifoldGrid, values: Vec<f64>) -> Self {
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &ManifoldGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Spectral coefficients (Fourier in FFT order, or spherical harmonics `c_lm`).
    pub fn spectral(&self) -> Vec<Complex64> {
        self.grid.forward(&self.values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> Result<f64> {
        crate::error::check_dim(self.values.len(), other.values.len())?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| f(*v)).collect() }
    }

    /// Nodal coordinate gradients, computed spectrally.
    pub fn gradient(&self) -> Vec<[f64; 2]> {
        self.grid.gradient(&self.spectral())
    }

    /// Spectral interpolation at an arbitrary point.
    pub fn evaluate(&self, x: [f64; 2]) -> f64 {
        self.grid.evaluate(&self.spectral(), x).0
    }
}

/// Applies the heat semigroup `exp(t kappa Delta)` spectrally.
pub fn heat_apply(grid: &ManifoldGrid, t: f64, f: &GridFunction) -> Result<GridFunction> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!("heat time must be finite and non-negative, got {t}")));
    }
    if !grid.same_nodes(f.grid()) {
        return Err(Error::domain("grid function lives on a different grid"));
    }
    if t == 0.0 {
        return Ok(GridFunction::from_raw(grid, f.values.clone()));
    }
    let mult = grid.heat_multiplier(t, 0.0);
    let coef: Vec<Complex64> = f.spectral().iter().zip(&mult).map(|(c, m)| c * m).collect();
    Ok(GridFunction::from_raw(grid, grid.inverse(&coef)))
}

/// Coordinate covector of `f` at `x` and its metric norm.
///
/// The covector is `[df/dphi, 0]` on the circle, `[df/dphi1, df/dphi2]` on the torus and
/// `[df/dtheta, df/dphi]` on the sphere.
pub fn metric_gradient(grid: &ManifoldGrid, f: &GridFunction, x: [f64; 2]) -> Result<([f64; 2], f64)> {
    if !grid.same_nodes(f.grid()) {
        return Err(Error::domain("grid function lives on a different grid"));
    }
    let coef = f.spectral();
    let (_, p) = grid.evaluate(&coef, x);
    let norm = match grid.manifold() {
        Manifold::Sphere2 { .. } if x[0].sin().abs() < 1e-12 => {
            let (_, q) = grid.evaluate(&coef, [x[0], x[1] + PI / 2.0]);
            p[0].hypot(q[0])
        }
        _ => grid.metric_norm(x, p),
    };
    Ok((p, norm))
}

/// Colatitude and longitude of a stereographic chart point `w = tan(theta/2) e^{i phi}`.
pub fn stereographic_to_sphere(w: Complex64) -> [f64; 2] {
    let phi = w.arg().rem_euclid(TAU);
    [2.0 * w.norm().atan(), phi]
}

/// Chart gradient `[f_x, f_y]` at `w = x + iy` of a sphere function, and its metric norm
/// `(1 + |w|^2) / 2 * |(f_x, f_y)|`.
pub fn stereographic_gradient(f: &GridFunction, w: Complex64) -> Result<([f64; 2], f64)> {
    if !matches!(f.grid().manifold(), Manifold::Sphere2 { .. }) {
        return Err(Error::Capability("stereographic gradient needs a sphere grid".into()));
    }
    let x = stereographic_to_sphere(w);
    let ((ft, fp), rho) = {
        let (p, _) = metric_gradient(f.grid(), f, x)?;
        ((p[0], p[1]), w.norm())
    };
    let chart = if rho == 0.0 {
        // Along the meridian phi = 0 and phi = pi/2 through the pole.
        let coef = f.spectral();
        let (_, gx) = f.grid().evaluate(&coef, [0.0, 0.0]);
        let (_, gy) = f.grid().evaluate(&coef, [0.0, PI / 2.0]);
        [2.0 * gx[0], 2.0 * gy[0]]
    } else {
        let dtheta = 2.0 / (1.0 + rho * rho);
        let (cx, cy) = (w.re / rho, w.im / rho);
        [ft * dtheta * cx - fp * w.im / (rho * rho), ft * dtheta * cy + fp * w.re / (rho * rho)]
    };
    let norm = if rho == 0.0 { 0.5 * chart[0].hypot(chart[1]) } else { ft.hypot(fp / x[0].sin()) };
    Ok((chart, norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample(grid: &ManifoldGrid) -> GridFunction {
        GridFunction::from_fn(grid, |x| match grid.manifold() {
            Manifold::Circle { .. } => (x[0].cos() + 0.5 * (3.0 * x[0]).sin()).exp(),
            Manifold::Torus2 { .. } => (x[0].sin() * x[1].cos()).exp() + (x[0] - x[1]).cos(),
            Manifold::Sphere2 { .. } => (x[0].cos() + x[0].sin() * x[1].sin()).exp(),
        })
        .unwrap()
    }

    fn grids() -> Vec<ManifoldGrid> {
        vec![
            ManifoldGrid::circle(64, 1.0).unwrap(),
            ManifoldGrid::torus(32, 0.5).unwrap(),
            ManifoldGrid::sphere(24, 2.0).unwrap(),
        ]
    }

    #[test]
    fn spectral_round_trip() {
        for g in grids() {
            let f = sample(&g);
            let back = GridFunction::from_spectral(&g, &f.spectral()).unwrap();
            assert!(f.max_abs_diff(&back).unwrap() < 1e-10, "{:?}", g.manifold());
        }
    }

    #[test]
    fn heat_on_eigenfunctions() {
        let g = ManifoldGrid::circle(32, 0.7).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0].cos()).unwrap();
        let h = heat_apply(&g, 0.3, &f).unwrap();
        let want = GridFunction::from_fn(&g, |x| (-0.7f64 * 0.3).exp() * x[0].cos()).unwrap();
        assert!(h.max_abs_diff(&want).unwrap() < 1e-14);

        let s = ManifoldGrid::sphere(8, 1.5).unwrap();
        let z = GridFunction::from_fn(&s, |x| x[0].cos()).unwrap();
        let h = heat_apply(&s, 0.2, &z).unwrap();
        let want = z.map(|v| (-2.0f64 * 1.5 * 0.2).exp() * v);
        assert!(h.max_abs_diff(&want).unwrap() < 1e-13);

        for g in grids() {
            let one = GridFunction::constant(&g, 1.0);
            let h = heat_apply(&g, 0.9, &one).unwrap();
            assert!(h.max_abs_diff(&one).unwrap() < 1e-12);
            let f = sample(&g);
            assert_eq!(heat_apply(&g, 0.0, &f).unwrap(), f);
            assert!(heat_apply(&g, -1e-3, &f).is_err());
        }
    }

    #[test]
    fn torus_eigenfunction_decay() {
        let g = ManifoldGrid::torus(16, 1.0).unwrap();
        let f = GridFunction::from_fn(&g, |x| (2.0 * x[0] + x[1]).sin()).unwrap();
        let h = heat_apply(&g, 0.1, &f).unwrap();
        assert!(h.max_abs_diff(&f.map(|v| (-0.5f64).exp() * v)).unwrap() < 1e-13);
    }

    #[test]
    fn spectral_gradients() {
        let g = ManifoldGrid::circle(32, 1.0).unwrap();
        let f = GridFunction::from_fn(&g, |x| x[0].cos()).unwrap();
        for (x, p) in g.nodes().iter().zip(f.gradient()) {
            assert!((p[0] + x[0].sin()).abs() < 1e-13);
        }
        let (p, n) = metric_gradient(&g, &f, [1.1, 0.0]).unwrap();
        assert!((p[0] + 1.1f64.sin()).abs() < 1e-13 && (n - 1.1f64.sin().abs()).abs() < 1e-13);

        let s = ManifoldGrid::sphere(12, 1.0).unwrap();
        let f = GridFunction::from_fn(&s, |x| x[0].sin() * x[1].cos()).unwrap();
        for (x, p) in s.nodes().iter().zip(f.gradient()) {
            assert!((p[0] - x[0].cos() * x[1].cos()).abs() < 1e-11);
            assert!((p[1] + x[0].sin() * x[1].sin()).abs() < 1e-11);
        }
        let c = GridFunction::constant(&s, 3.0);
        let (_, n) = metric_gradient(&s, &c, [0.7, 2.0]).unwrap();
        assert!(n < 1e-12);
    }

    #[test]
    fn stereographic_norm_matches_finite_differences() {
        let s = ManifoldGrid::sphere(16, 1.0).unwrap();
        // x / (1 + |w|^2) is half the embedding coordinate sin(theta) cos(phi).
        let f = GridFunction::from_fn(&s, |x| 0.5 * x[0].sin() * x[1].cos()).unwrap();
        let chart = |w: Complex64| w.re / (1.0 + w.norm_sqr());
        for w in [Complex64::new(0.3, -0.4), Complex64::new(1.5, 0.2), Complex64::new(-3.0, 2.5), Complex64::new(0.0, 0.0)] {
            let (g, n) = stereographic_gradient(&f, w).unwrap();
            let h = 1e-6;
            let fx = (chart(w + h) - chart(w - h)) / (2.0 * h);
            let fy = (chart(w + Complex64::new(0.0, h)) - chart(w - Complex64::new(0.0, h))) / (2.0 * h);
            let fd = (1.0 + w.norm_sqr()) / 2.0 * fx.hypot(fy);
            assert!((n - fd).abs() <= 1e-6 * fd.max(1e-3), "w={w}: {n} vs {fd}");
            assert!((g[0] - fx).abs() < 1e-6 && (g[1] - fy).abs() < 1e-6, "w={w}");
        }
    }

    #[test]
    fn semigroup_law() {
        for g in grids() {
            let f = sample(&g);
            let a = heat_apply(&g, 0.35, &f).unwrap();
            let b = heat_apply(&g, 0.15, &heat_apply(&g, 0.2, &f).unwrap()).unwrap();
            assert!(a.max_abs_diff(&b).unwrap() < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn contraction_and_positivity(t in 1e-4f64..2.0, a in -2.0f64..2.0, b in -2.0f64..2.0, k in 1usize..4) {
            for g in grids() {
                let f = GridFunction::from_fn(&g, |x| {
                    let e = match g.manifold() {
                        Manifold::Sphere2 { .. } => a * (k as f64 * x[0]).cos() + b * x[0].sin() * x[1].sin(),
                        _ => a * (k as f64 * x[0]).cos() + b * x[1].sin(),
                    };
                    e.exp()
                })
                .unwrap();
                let h = heat_apply(&g, t, &f).unwrap();
                prop_assert!(h.sup_norm() <= f.sup_norm() * (1.0 + 1e-10));
                prop_assert!(h.min() >= -1e-10);
            }
        }
    }
}
