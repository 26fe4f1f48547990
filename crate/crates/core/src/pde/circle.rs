//! Exact and semi-exact solutions of the circle game.
//!
//! With the cost `cos(phi)` the value is even and decreasing on `[0, pi]`, so `|S'| = -S'`
//! there and the stationary equation `kappa S'' + alpha |S'| + cos - lambda = 0` reduces to
//! the linear first-order problem `kappa f' - alpha f + cos - lambda = 0`, `f(0) = f(pi) = 0`,
//! for `f = S'`.

use std::f64::consts::PI;

use super::grid::{GridFunction, Manifold, ManifoldGrid};
use crate::{Error, Result};

/// Closed-form ergodic constant of `S'' + alpha |S'| + cos(phi) - lambda = 0`.
pub fn circle_lambda(alpha: f64) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let e = (alpha * PI).exp_m1();
    alpha * alpha / (alpha * alpha + 1.0) * (e + 2.0) / e
}

/// Closed-form ergodic constant for the generator `kappa d^2/dphi^2`.
pub fn circle_lambda_scaled(alpha: f64, kappa: f64) -> f64 {
    circle_lambda(alpha / kappa)
}

#[derive(Debug, Clone)]
pub struct StationaryCircle {
    pub lambda: f64,
    /// Mean-zero relative value on the grid.
    pub value: GridFunction,
    /// Secant iterations used by the shooting step.
    pub shooting_iterations: usize,
}

const RK_STEPS_PER_CELL: usize = 64;

/// RK4 for `kappa f' = alpha f - cos(phi) + lambda`, `S' = f`, from `phi = 0`, returning
/// `(f, S)` at every `stride`-th point of a mesh of `cells * stride` steps on `[0, pi]`.
fn shoot(alpha: f64, kappa: f64, lambda: f64, cells: usize) -> Vec<(f64, f64)> {
    let n = cells * RK_STEPS_PER_CELL;
    let h = PI / n as f64;
    let rhs = |phi: f64, f: f64| (alpha * f - phi.cos() + lambda) / kappa;
    let (mut f, mut s) = (0.0, 0.0);
    let mut out = vec![(f, s)];
    for k in 0..n {
        let phi = k as f64 * h;
        let k1 = rhs(phi, f);
        let k2 = rhs(phi + 0.5 * h, f + 0.5 * h * k1);
        let k3 = rhs(phi + 0.5 * h, f + 0.5 * h * k2);
        let k4 = rhs(phi + h, f + h * k3);
        let l1 = f;
        let l2 = f + 0.5 * h * k1;
        let l3 = f + 0.5 * h * k2;
        let l4 = f + h * k3;
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s += h / 6.0 * (l1 + 2.0 * l2 + 2.0 * l3 + l4);
        if (k + 1) % RK_STEPS_PER_CELL == 0 {
            out.push((f, s));
        }
    }
    out
}

/// Solves the stationary circle problem on `grid` (a circle; its `kappa` is the diffusion
/// coefficient) by shooting on `lambda` and integrating `S' = f`.
pub fn stationary_solve_circle(alpha: f64, grid: &ManifoldGrid) -> Result<StationaryCircle> {
    let Manifold::Circle { n } = grid.manifold() else {
        return Err(Error::Capability("stationary circle solver needs a circle grid".into()));
    };
    if !alpha.is_finite() {
        return Err(Error::domain("alpha must be finite"));
    }
    let kappa = grid.kappa();
    let half = n / 2;
    let end = |lambda: f64| shoot(alpha, kappa, lambda, half).last().unwrap().0;
    // f(pi) is affine in lambda, so the secant step lands on the root.
    let (mut l0, mut l1) = (0.0, 1.0);
    let (mut e0, mut e1) = (end(l0), end(l1));
    let mut iterations = 0;
    while e1.abs() > 1e-14 * (1.0 + e1.abs()) && iterations < 8 && e1 != e0 {
        let l2 = l1 - e1 * (l1 - l0) / (e1 - e0);
        (l0, e0) = (l1, e1);
        l1 = l2;
        e1 = end(l1);
        iterations += 1;
    }
    let lambda = l1;
    let path = shoot(alpha, kappa, lambda, half);
    let mut values: Vec<f64> = (0..n).map(|j| path[if j <= half { j } else { n - j }].1).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    values.iter_mut().for_each(|v| *v -= mean);
    Ok(StationaryCircle { lambda, value: GridFunction::new(grid, values)?, shooting_iterations: iterations })
}

/// Closed-form solution of `S''/2 - alpha S' + cos(phi) - delta S = 0` on `[0, pi]` with
/// `S'(0) = S'(pi) = 0`, extended evenly to the circle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountedCircle {
    pub alpha: f64,
    pub delta: f64,
    pub a1: f64,
    pub a2: f64,
    pub a: f64,
    pub b: f64,
    /// Coefficient of `exp(a1 (phi - pi))`; the plain `A` is `a_scaled * exp(-a1 pi)`.
    pub a_scaled: f64,
    pub b_coef: f64,
}

impl DiscountedCircle {
    pub fn new(alpha: f64, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0) || !alpha.is_finite() {
            return Err(Error::domain("discount must be positive and alpha finite"));
        }
        let root = (alpha * alpha + 2.0 * delta).sqrt();
        let (a1, a2) = (alpha + root, alpha - root);
        let q = 1.0 + 2.0 * delta;
        let den = 4.0 * alpha * alpha + q * q;
        let (a, b) = (2.0 * q / den, 4.0 * alpha / den);
        // Rows: S'(0) = 0 and S'(pi) = 0 with A = a_scaled e^{-a1 pi}.
        let m = [[a1 * (-a1 * PI).exp(), a2], [a1, a2 * (a2 * PI).exp()]];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let scale = m.iter().flatten().fold(0.0f64, |s, v| s.max(v.abs()));
        if det.abs() <= 1e-14 * scale * scale {
            return Err(Error::Degenerate(format!("boundary system is singular (det = {det:e})")));
        }
        let rhs = [-b, b];
        let a_scaled = (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det;
        let b_coef = (m[0][0] * rhs[1] - m[1][0] * rhs[0]) / det;
        Ok(Self { alpha, delta, a1, a2, a, b, a_scaled, b_coef })
    }

    fn fold(phi: f64) -> (f64, f64) {
        let p = phi.rem_euclid(2.0 * PI);
        if p <= PI {
            (p, 1.0)
        } else {
            (2.0 * PI - p, -1.0)
        }
    }

    pub fn value(&self, phi: f64) -> f64 {
        let (p, _) = Self::fold(phi);
        self.a_scaled * (self.a1 * (p - PI)).exp() + self.b_coef * (self.a2 * p).exp() + self.a * p.cos() + self.b * p.sin()
    }

    pub fn derivative(&self, phi: f64) -> f64 {
        let (p, sign) = Self::fold(phi);
        sign * (self.a1 * self.a_scaled * (self.a1 * (p - PI)).exp() + self.a2 * self.b_coef * (self.a2 * p).exp()
            - self.a * p.sin()
            + self.b * p.cos())
    }

    pub fn second_derivative(&self, phi: f64) -> f64 {
        let (p, _) = Self::fold(phi);
        self.a1 * self.a1 * self.a_scaled * (self.a1 * (p - PI)).exp()
            + self.a2 * self.a2 * self.b_coef * (self.a2 * p).exp()
            - self.a * p.cos()
            - self.b * p.sin()
    }

    /// Residual of `S''/2 + alpha |S'| + cos - delta S` at `phi`.
    pub fn residual(&self, phi: f64) -> f64 {
        0.5 * self.second_derivative(phi) + self.alpha * self.derivative(phi).abs() + phi.cos() - self.delta * self.value(phi)
    }
}

/// Closed-form discounted circle value on an `n`-node circle grid with `kappa = 1/2`.
pub fn discounted_solve_circle(alpha: f64, delta: f64, n: usize) -> Result<(DiscountedCircle, GridFunction)> {
    let sol = DiscountedCircle::new(alpha, delta)?;
    let grid = ManifoldGrid::circle(n, 0.5)?;
    let f = GridFunction::from_fn(&grid, |x| sol.value(x[0]))?;
    Ok((sol, f))
}

/// One row of a smoothing sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingRow {
    pub sample: usize,
    pub t: f64,
    /// `sup |grad P_t f|_M * sqrt(t) / sup |f|`.
    pub ratio: f64,
}

/// Tabulates the gradient smoothing ratio of the heat semigroup over samples and times.
pub fn smoothing_estimate_check(grid: &ManifoldGrid, samples: &[GridFunction], times: &[f64]) -> Result<Vec<SmoothingRow>> {
    let mut rows = Vec::with_capacity(samples.len() * times.len());
    for (k, f) in samples.iter().enumerate() {
        if !grid.same_nodes(f.grid()) {
            return Err(Error::domain("sample lives on a different grid"));
        }
        let coef = f.spectral();
        let sup = f.sup_norm();
        for &t in times {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::domain("smoothing times must be positive"));
            }
            let m = grid.heat_multiplier(t, 0.0);
            let c: Vec<_> = coef.iter().zip(&m).map(|(c, m)| c * m).collect();
            let grad = grid.gradient(&c);
            let g = grid.nodes().iter().zip(&grad).fold(0.0f64, |a, (x, p)| a.max(grid.metric_norm(*x, *p)));
            let ratio = if sup > 0.0 { g * t.sqrt() / sup } else { 0.0 };
            rows.push(SmoothingRow { sample: k, t, ratio });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent quadrature oracle: lambda = int e^{-a s} cos s / int e^{-a s} on [0, pi].
    fn lambda_quadrature(alpha: f64) -> f64 {
        let n = 20000;
        let h = PI / n as f64;
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..=n {
            let s = k as f64 * h;
            let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            num += w * (-alpha * s).exp() * s.cos();
            den += w * (-alpha * s).exp();
        }
        num / den
    }

    #[test]
    fn closed_form_lambda_values() {
        assert!((circle_lambda(1.0) - 0.5451657).abs() < 1e-6);
        assert!((circle_lambda(2.0) - 0.8029934).abs() < 1e-6);
        for a in [0.25, 0.5, 1.0, 2.0, 3.5] {
            assert!((circle_lambda(a) - lambda_quadrature(a)).abs() < 1e-12, "{a}");
            assert!((circle_lambda(-a) + circle_lambda(a)).abs() < 1e-15);
        }
        assert!((circle_lambda_scaled(1.0, 0.5) - circle_lambda(2.0)).abs() < 1e-15);
    }

    #[test]
    fn shooting_matches_closed_form() {
        for kappa in [1.0, 0.5] {
            let g = ManifoldGrid::circle(256, kappa).unwrap();
            for a in [0.25, 0.5, 1.0, 2.0, -1.0] {
                let s = stationary_solve_circle(a, &g).unwrap();
                assert!((s.lambda - circle_lambda_scaled(a, kappa)).abs() < 1e-10, "a={a} kappa={kappa}");
            }
        }
    }

    #[test]
    fn stationary_value_satisfies_the_full_equation() {
        let g = ManifoldGrid::circle(512, 1.0).unwrap();
        let s = stationary_solve_circle(1.0, &g).unwrap();
        let v = s.value.values();
        let (n, h) = (v.len(), 2.0 * PI / 512.0);
        // S''' jumps at 0 and pi, so the difference quotient is only first order there.
        let (mut interior, mut kinks): (f64, f64) = (0.0, 0.0);
        for j in 0..n {
            let (l, r) = (v[(j + n - 1) % n], v[(j + 1) % n]);
            let d2 = (r - 2.0 * v[j] + l) / (h * h);
            let d1 = (r - l) / (2.0 * h);
            let phi = 2.0 * PI * j as f64 / n as f64;
            let r = (d2 + d1.abs() + phi.cos() - s.lambda).abs();
            if j % 256 < 4 || j % 256 > 252 {
                kinks = kinks.max(r);
            } else {
                interior = interior.max(r);
            }
        }
        assert!(interior < 1e-4 && kinks < 2e-2, "{interior} {kinks}");
        assert!(v[..=n / 2].windows(2).all(|p| p[1] <= p[0]));
        let x = v.iter().sum::<f64>().abs();
        assert!(x < 1e-9);
    }

    #[test]
    fn discounted_constants_and_residual() {
        let (sol, f) = discounted_solve_circle(1.0, 1.0, 1024).unwrap();
        let r3 = 3f64.sqrt();
        assert!((sol.a1 - (1.0 + r3)).abs() < 1e-15 && (sol.a2 - (1.0 - r3)).abs() < 1e-15);
        assert!((sol.b - 4.0 / 13.0).abs() < 1e-15 && (sol.a - 6.0 / 13.0).abs() < 1e-15);
        assert!(sol.derivative(0.0).abs() < 1e-8 && sol.derivative(PI).abs() < 1e-8);
        let worst = f.grid().nodes().iter().map(|x| sol.residual(x[0])).filter(|r| r.is_finite()).fold(0.0f64, |m, r| m.max(r.abs()));
        assert!(worst < 1e-8, "{worst}");
        assert!(DiscountedCircle::new(1.0, 0.0).is_err());
    }

    #[test]
    fn smoothing_sweep() {
        let g = ManifoldGrid::circle(512, 1.0).unwrap();
        let step = GridFunction::from_fn(&g, |x| if x[0] < PI { 1.0 } else { -1.0 }).unwrap();
        let one = GridFunction::constant(&g, 1.0);
        let times = [1e-3, 1e-2, 1e-1, 1.0];
        let rows = smoothing_estimate_check(&g, &[step, one], &times).unwrap();
        for r in &rows {
            if r.sample == 0 {
                assert!(r.ratio > 0.05 && r.ratio < 2.0, "{r:?}");
            } else {
                assert!(r.ratio < 1e-12);
            }
        }
    }
}
