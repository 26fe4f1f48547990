//! Mild-form fixed point for backward HJB equations.
//!
//! With `tau = T - t` the backward problem `dS/dt + kappa Delta S + H(x, dS) - delta S = 0`,
//! `S(T) = Y` becomes the forward mild equation
//!
//! ```text
//! f_tau = P_tau Y + int_0^tau P_{tau - s} H(., df_s) ds,    P_t = exp(t (kappa Delta - delta))
//! ```
//!
//! The integral uses the left-endpoint rule on a uniform grid, so the discrete fixed point is
//! `f_{n+1} = P_dt (f_n + dt H(., df_n))`. Picard iterates are swept over windows of the time
//! grid; each sweep evaluates the Hamiltonian on every slice of the previous iterate, which is
//! the data-parallel part.

use num_complex::Complex64;

use super::field::{CoupledField, HamiltonianField};
use super::grid::{GridFunction, ManifoldGrid};
use super::value::ValueFunction;
use crate::exec::{map_indexed, Execution};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MildConfig {
    pub dt: f64,
    /// Stop once the sup-norm change between iterates falls below this.
    pub tolerance: f64,
    /// Per window.
    pub max_iterations: usize,
    /// Killing rate `delta` of a discounted problem.
    pub discount: f64,
    /// Length of the time windows swept by the Picard iteration.
    pub window: f64,
    pub exec: Execution,
}

impl Default for MildConfig {
    fn default() -> Self {
        Self { dt: 1e-2, tolerance: 1e-10, max_iterations: 200, discount: 0.0, window: 1.0, exec: Execution::default() }
    }
}

impl MildConfig {
    fn validate(&self, horizon: f64) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(horizon) || !ok(self.dt) || !ok(self.tolerance) || !ok(self.window) {
            return Err(Error::domain("horizon, dt, tolerance and window must be positive"));
        }
        if !(self.discount.is_finite() && self.discount >= 0.0) {
            return Err(Error::domain("discount must be non-negative"));
        }
        if self.max_iterations == 0 {
            return Err(Error::domain("max_iterations must be positive"));
        }
        Ok(())
    }
}

type Eval<'a> = dyn Fn([f64; 2], &[[f64; 2]], &mut [f64]) + Sync + 'a;

struct Slice {
    coef: Vec<Vec<Complex64>>,
    values: Vec<Vec<f64>>,
}

struct System {
    slices: Vec<Slice>,
    iterations: usize,
    residuals: Vec<f64>,
}

fn solve_system(grid: &ManifoldGrid, terminals: &[&GridFunction], eval: &Eval<'_>, horizon: f64, cfg: &MildConfig) -> Result<System> {
    cfg.validate(horizon)?;
    for t in terminals {
        if !grid.same_nodes(t.grid()) {
            return Err(Error::domain("terminal data lives on a different grid"));
        }
    }
    let k = terminals.len();
    let steps = (horizon / cfg.dt).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let per_window = ((cfg.window / dt).round() as usize).clamp(1, steps);
    let prop = grid.heat_multiplier(dt, cfg.discount);
    let nodes = grid.nodes();

    let first = Slice {
        coef: terminals.iter().map(|t| t.spectral()).collect(),
        values: terminals.iter().map(|t| t.values().to_vec()).collect(),
    };
    let mut slices = vec![first];
    let mut iterations = 0;
    let mut residuals = Vec::new();

    let mut start = 0;
    while start < steps {
        let end = (start + per_window).min(steps);
        // Initial guess: pure heat flow from the window's first slice.
        let mut guess: Vec<Slice> = Vec::with_capacity(end - start);
        for _ in start..end {
            let prev = guess.last().unwrap_or(&slices[start]);
            let coef: Vec<Vec<Complex64>> =
                prev.coef.iter().map(|c| c.iter().zip(&prop).map(|(c, m)| c * m).collect()).collect();
            let values = coef.iter().map(|c| grid.inverse(c)).collect();
            guess.push(Slice { coef, values });
        }

        let mut window_res = Vec::new();
        loop {
            // Hamiltonian on slices start..end-1 of the current iterate.
            let ham: Vec<Vec<Vec<Complex64>>> = map_indexed(cfg.exec, end - start, |i| {
                let s = if i == 0 { &slices[start] } else { &guess[i - 1] };
                let grads: Vec<Vec<[f64; 2]>> = s.coef.iter().map(|c| grid.gradient(c)).collect();
                let mut out = vec![vec![0.0; nodes.len()]; k];
                let mut p = vec![[0.0; 2]; k];
                let mut h = vec![0.0; k];
                for (n, x) in nodes.iter().enumerate() {
                    for c in 0..k {
                        p[c] = grads[c][n];
                    }
                    eval(*x, &p, &mut h);
                    for c in 0..k {
                        out[c][n] = h[c];
                    }
                }
                out.iter().map(|v| grid.forward(v)).collect()
            });
            let mut coefs: Vec<Vec<Vec<Complex64>>> = Vec::with_capacity(end - start);
            for (i, hc) in ham.iter().enumerate() {
                let prev = if i == 0 { &slices[start].coef } else { &coefs[i - 1] };
                let next: Vec<Vec<Complex64>> = (0..k)
                    .map(|c| prev[c].iter().zip(&hc[c]).zip(&prop).map(|((f, h), m)| (f + h * dt) * m).collect())
                    .collect();
                coefs.push(next);
            }
            let new: Vec<Slice> = map_indexed(cfg.exec, coefs.len(), |i| {
                let values = coefs[i].iter().map(|c| grid.inverse(c)).collect();
                Slice { coef: coefs[i].clone(), values }
            });
            let res = new
                .iter()
                .zip(&guess)
                .flat_map(|(a, b)| a.values.iter().zip(&b.values))
                .flat_map(|(a, b)| a.iter().zip(b))
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            guess = new;
            iterations += 1;
            window_res.push(res);
            if !res.is_finite() {
                residuals.extend(window_res);
                return Err(Error::Divergence { residuals });
            }
            if res < cfg.tolerance {
                break;
            }
            if window_res.len() >= cfg.max_iterations {
                residuals.extend(window_res);
                return Err(Error::Divergence { residuals });
            }
        }
        residuals.extend(window_res);
        slices.extend(guess);
        start = end;
    }
    Ok(System { slices, iterations, residuals })
}

fn into_value(grid: &ManifoldGrid, sys: &System, c: usize, horizon: f64, terminal: &GridFunction) -> ValueFunction {
    let n = sys.slices.len() - 1;
    let mut slices: Vec<GridFunction> =
        sys.slices.iter().rev().map(|s| GridFunction::from_raw(grid, s.values[c].clone())).collect();
    // The terminal slice is the supplied data, untouched by transforms.
    *slices.last_mut().unwrap() = GridFunction::from_raw(grid, terminal.values().to_vec());
    ValueFunction {
        times: (0..=n).map(|i| horizon * i as f64 / n as f64).collect(),
        slices,
        iterations: sys.iterations,
        residuals: sys.residuals.clone(),
    }
}

/// Solves `dS/dt + kappa Delta S + H(x, dS) - delta S = 0`, `S(T) = terminal`, in mild form.
pub fn mild_solve(
    grid: &ManifoldGrid,
    terminal: &GridFunction,
    hamiltonian: &dyn HamiltonianField,
    horizon: f64,
    config: &MildConfig,
) -> Result<ValueFunction> {
    let eval = |x: [f64; 2], p: &[[f64; 2]], out: &mut [f64]| out[0] = hamiltonian.eval(x, p[0]);
    let sys = solve_system(grid, &[terminal], &eval, horizon, config)?;
    Ok(into_value(grid, &sys, 0, horizon, terminal))
}

/// Simultaneous mild fixed point of two coupled backward equations, one per player.
pub fn vector_mild_solve(
    grid: &ManifoldGrid,
    terminals: (&GridFunction, &GridFunction),
    fields: &dyn CoupledField,
    horizon: f64,
    config: &MildConfig,
) -> Result<(ValueFunction, ValueFunction)> {
    let eval = |x: [f64; 2], p: &[[f64; 2]], out: &mut [f64]| {
        let h = fields.eval(x, p[0], p[1]);
        out[0] = h[0];
        out[1] = h[1];
    };
    let sys = solve_system(grid, &[terminals.0, terminals.1], &eval, horizon, config)?;
    Ok((into_value(grid, &sys, 0, horizon, terminals.0), into_value(grid, &sys, 1, horizon, terminals.1)))
}
