//! Explicit finite-difference marching for backward HJB equations.
//!
//! Flat grids use second-order central differences. The sphere is discretised on the same
//! Gaussian-latitude nodes as the spectral solver. Colatitude derivatives use non-uniform
//! three-point stencils whose polar ghost value is read across the pole, at `(theta, phi + pi)`;
//! longitude derivatives are spectral per latitude. Near the poles, longitude wavenumbers above `sin(theta) * nlon / 2` are removed
//! from the tendency, which keeps the stability limit set by the equatorial spacing.

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::field::HamiltonianField;
use super::grid::{GridFunction, Manifold, ManifoldGrid};
use super::value::ValueFunction;
use crate::exec::{map_indexed, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    /// Time step; `None` picks half the stability limit.
    pub dt: Option<f64>,
    pub discount: f64,
    /// Number of stored intervals; slices are kept at `snapshots + 1` evenly spaced times.
    pub snapshots: usize,
    pub exec: Execution,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { dt: None, discount: 0.0, snapshots: 10, exec: Execution::default() }
    }
}

struct Row {
    /// Colatitude neighbours as (row, longitude shift).
    up: (usize, usize),
    down: (usize, usize),
    grad: [f64; 3],
    /// Colatitude part of the Laplacian, `S_tt + cot(t) S_t`, on the same three points.
    lap: [f64; 3],
    sin: f64,
    mmax: usize,
}

enum Scheme {
    Flat { n: usize, rows: usize, h: f64 },
    Sphere { rows: Vec<Row>, nlon: usize, fwd: Arc<dyn Fft<f64>>, inv: Arc<dyn Fft<f64>> },
}

fn sphere_rows(theta: &[f64], nlon: usize, lmax: usize) -> Vec<Row> {
    let nlat = theta.len();
    let half = nlon / 2;
    (0..nlat)
        .map(|i| {
            let t = theta[i];
            let (tm, up) = if i == 0 { (-t, (0, half)) } else { (theta[i - 1], (i - 1, 0)) };
            let (tp, down) = if i + 1 == nlat { (TAU - t, (i, half)) } else { (theta[i + 1], (i + 1, 0)) };
            let (h1, h2) = (t - tm, tp - t);
            let grad = [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))];
            let second = [2.0 / (h1 * (h1 + h2)), -2.0 / (h1 * h2), 2.0 / (h2 * (h1 + h2))];
            let cot = t.cos() / t.sin();
            let lap = [second[0] + cot * grad[0], second[1] + cot * grad[1], second[2] + cot * grad[2]];
            let mmax = ((t.sin() * half as f64).floor() as usize).clamp(1, lmax);
            Row { up, down, grad, lap, sin: t.sin(), mmax }
        })
        .collect()
}

impl Scheme {
    fn new(grid: &ManifoldGrid) -> Self {
        match grid.manifold() {
            Manifold::Circle { n } => Scheme::Flat { n, rows: 1, h: TAU / n as f64 },
            Manifold::Torus2 { n } => Scheme::Flat { n, rows: n, h: TAU / n as f64 },
            Manifold::Sphere2 { lmax } => {
                let sht = grid.sht().unwrap();
                let mut p = FftPlanner::new();
                Scheme::Sphere {
                    rows: sphere_rows(&sht.theta, sht.nlon, lmax),
                    nlon: sht.nlon,
                    fwd: p.plan_fft_forward(sht.nlon),
                    inv: p.plan_fft_inverse(sht.nlon),
                }
            }
        }
    }

    fn rows(&self) -> usize {
        match self {
            Scheme::Flat { rows, .. } => *rows,
            Scheme::Sphere { rows, .. } => rows.len(),
        }
    }

    /// Largest Gershgorin bound of the linear part.
    fn spectral_radius(&self, kappa: f64, discount: f64) -> f64 {
        match self {
            Scheme::Flat { rows, h, .. } => {
                let axes = if *rows == 1 { 1.0 } else { 2.0 };
                kappa * 4.0 * axes / (h * h) + discount
            }
            Scheme::Sphere { rows, .. } => rows
                .iter()
                .map(|r| kappa * (r.lap.iter().map(|w| w.abs()).sum::<f64>() + (r.mmax * r.mmax) as f64 / (r.sin * r.sin)) + discount)
                .fold(0.0, f64::max),
        }
    }

    fn tendency(&self, i: usize, s: &[f64], grid: &ManifoldGrid, h: &dyn HamiltonianField, discount: f64) -> Vec<f64> {
        let kappa = grid.kappa();
        let nodes = grid.nodes();
        match self {
            Scheme::Flat { n, rows, h: dx } => {
                let n = *n;
                let at = |r: usize, c: usize| s[r * n + c];
                (0..n)
                    .map(|j| {
                        let (jm, jp) = ((j + n - 1) % n, (j + 1) % n);
                        let c = at(i, j);
                        let mut lap = (at(i, jp) - 2.0 * c + at(i, jm)) / (dx * dx);
                        let mut p = [0.0, (at(i, jp) - at(i, jm)) / (2.0 * dx)];
                        if *rows == 1 {
                            p = [p[1], 0.0];
                        } else {
                            let (im, ip) = ((i + n - 1) % n, (i + 1) % n);
                            lap += (at(ip, j) - 2.0 * c + at(im, j)) / (dx * dx);
                            p[0] = (at(ip, j) - at(im, j)) / (2.0 * dx);
                        }
                        kappa * lap + h.eval(nodes[i * n + j], p) - discount * c
                    })
                    .collect()
            }
            Scheme::Sphere { rows, nlon, fwd, inv } => {
                let nlon = *nlon;
                let r = &rows[i];
                let row = &s[i * nlon..(i + 1) * nlon];
                let keep = |k: usize| {
                    let m = if k <= nlon / 2 { k } else { nlon - k };
                    m <= r.mmax && m != nlon / 2
                };
                let signed = |k: usize| if k <= nlon / 2 { k as f64 } else { k as f64 - nlon as f64 };
                let mut spec: Vec<Complex64> = row.iter().map(|v| Complex64::new(*v, 0.0)).collect();
                fwd.process(&mut spec);
                let scale = 1.0 / nlon as f64;
                let mut d1: Vec<Complex64> =
                    (0..nlon).map(|k| if keep(k) { spec[k] * Complex64::new(0.0, signed(k) * scale) } else { Complex64::new(0.0, 0.0) }).collect();
                let mut d2: Vec<Complex64> =
                    (0..nlon).map(|k| if keep(k) { spec[k] * (-signed(k) * signed(k) * scale) } else { Complex64::new(0.0, 0.0) }).collect();
                inv.process(&mut d1);
                inv.process(&mut d2);
                let val = |(r, shift): (usize, usize), j: usize| s[r * nlon + (j + shift) % nlon];
                let mut out: Vec<Complex64> = (0..nlon)
                    .map(|j| {
                        let c = row[j];
                        let (u, d) = (val(r.up, j), val(r.down, j));
                        let lap_t = r.lap[0] * u + r.lap[1] * c + r.lap[2] * d;
                        let dt = r.grad[0] * u + r.grad[1] * c + r.grad[2] * d;
                        let lap = lap_t + d2[j].re / (r.sin * r.sin);
                        let v = kappa * lap + h.eval(nodes[i * nlon + j], [dt, d1[j].re]) - discount * c;
                        Complex64::new(v, 0.0)
                    })
                    .collect();
                fwd.process(&mut out);
                for (k, o) in out.iter_mut().enumerate() {
                    *o = if keep(k) || k == 0 { *o * scale } else { Complex64::new(0.0, 0.0) };
                }
                inv.process(&mut out);
                out.iter().map(|c| c.re).collect()
            }
        }
    }
}

/// Largest stable explicit time step for the given Hamiltonian and discount.
pub fn fd_stability_limit(grid: &ManifoldGrid, hamiltonian: &dyn HamiltonianField, discount: f64) -> f64 {
    let diffusive = 2.0 / Scheme::new(grid).spectral_radius(grid.kappa(), discount);
    let l = hamiltonian.lipschitz();
    if l > 0.0 {
        diffusive.min(2.0 * grid.kappa() / (l * l))
    } else {
        diffusive
    }
}

/// Backward explicit marching of `dS/dt + kappa Delta S + H(x, dS) - delta S = 0`.
pub fn fd_solve(
    grid: &ManifoldGrid,
    terminal: &GridFunction,
    hamiltonian: &dyn HamiltonianField,
    horizon: f64,
    config: &FdConfig,
) -> Result<ValueFunction> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain("horizon must be positive"));
    }
    if !(config.discount.is_finite() && config.discount >= 0.0) || config.snapshots == 0 {
        return Err(Error::domain("discount must be non-negative and snapshots positive"));
    }
    if !grid.same_nodes(terminal.grid()) {
        return Err(Error::domain("terminal data lives on a different grid"));
    }
    let limit = fd_stability_limit(grid, hamiltonian, config.discount);
    let target = match config.dt {
        Some(dt) if !(dt.is_finite() && dt > 0.0) => return Err(Error::domain("dt must be positive")),
        Some(dt) if dt > limit => return Err(Error::Cfl { dt, limit }),
        Some(dt) => dt,
        None => 0.5 * limit,
    };
    let steps = (horizon / target).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let scheme = Scheme::new(grid);
    let rows = scheme.rows();
    let cols = grid.len() / rows;

    let mut marks: Vec<usize> = (0..=config.snapshots).map(|k| (k * steps + config.snapshots / 2) / config.snapshots).collect();
    marks.dedup();
    let mut state = terminal.values().to_vec();
    let mut stored = vec![(0usize, terminal.clone())];
    for step in 1..=steps {
        let tend = map_indexed(config.exec, rows, |i| scheme.tendency(i, &state, grid, hamiltonian, config.discount));
        for (i, t) in tend.iter().enumerate() {
            for (s, d) in state[i * cols..(i + 1) * cols].iter_mut().zip(t) {
                *s += dt * d;
            }
        }
        if marks.contains(&step) {
            if state.iter().any(|v| !v.is_finite()) {
                return Err(Error::Cfl { dt, limit });
            }
            stored.push((step, GridFunction::from_raw(grid, state.clone())));
        }
    }
    stored.reverse();
    Ok(ValueFunction {
        times: stored.iter().map(|(s, _)| (steps - s) as f64 * dt).collect(),
        slices: stored.into_iter().map(|(_, f)| f).collect(),
        iterations: 0,
        residuals: Vec::new(),
    })
}
