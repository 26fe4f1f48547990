use std::fmt;

use num_complex::Complex64;

use super::fields::sgn;
use super::reduce::{Reduction, PLAYER_I, PLAYER_II};
use crate::filtering::{ConstantControl, FeedbackPolicy, PolicyState};
use crate::pde::{Manifold, ManifoldGrid, ValueFunction};

/// Bang-bang controls from a value gradient: `u = U sgn<b1, p>`, `v = -V sgn<b2, p>`.
pub fn bang_bang(reduction: &Reduction, x: [f64; 2], p: [f64; 2], u_max: f64, v_max: f64) -> (f64, f64) {
    (u_max * sgn(reduction.pairing(PLAYER_I, x, p)), -v_max * sgn(reduction.pairing(PLAYER_II, x, p)))
}

enum Gradients {
    /// Nodal gradients per slice, interpolated (circle and torus).
    Nodal(Vec<Vec<[f64; 2]>>),
    /// Spectral coefficients per slice, summed at the point (sphere).
    Spectral(Vec<Vec<Complex64>>),
}

/// Feedback policy extracted from a zero-sum value function.
pub struct BangBangPolicy {
    reduction: Reduction,
    grid: ManifoldGrid,
    u_max: f64,
    v_max: f64,
    times: Vec<f64>,
    gradients: Gradients,
}

impl fmt::Debug for BangBangPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BangBangPolicy")
            .field("grid", &self.grid)
            .field("u_max", &self.u_max)
            .field("v_max", &self.v_max)
            .field("slices", &self.times.len())
            .finish()
    }
}

impl BangBangPolicy {
    pub fn from_value(reduction: &Reduction, value: &ValueFunction, u_max: f64, v_max: f64) -> Self {
        let grid = value.grid().clone();
        let gradients = match grid.manifold() {
            Manifold::Sphere2 { .. } => Gradients::Spectral(value.slices().iter().map(|s| s.spectral()).collect()),
            _ => Gradients::Nodal(value.slices().iter().map(|s| s.gradient()).collect()),
        };
        Self { reduction: reduction.clone(), grid, u_max, v_max, times: value.times().to_vec(), gradients }
    }

    fn slice(&self, t: f64) -> usize {
        let k = self.times.partition_point(|s| *s < t);
        if k == 0 {
            0
        } else if k == self.times.len() || (t - self.times[k - 1]) < (self.times[k] - t) {
            k - 1
        } else {
            k
        }
    }

    /// Coordinate gradient of the value at time `t` and point `x`.
    pub fn gradient_at(&self, t: f64, x: [f64; 2]) -> [f64; 2] {
        let k = self.slice(t);
        match &self.gradients {
            Gradients::Spectral(c) => self.grid.evaluate(&c[k], x).1,
            Gradients::Nodal(g) => {
                let g = &g[k];
                let tau = std::f64::consts::TAU;
                match self.grid.manifold() {
                    Manifold::Circle { n } => {
                        let s = x[0].rem_euclid(tau) / tau * n as f64;
                        let (i, f) = (s.floor() as usize % n, s - s.floor());
                        [(1.0 - f) * g[i][0] + f * g[(i + 1) % n][0], 0.0]
                    }
                    Manifold::Torus2 { n } => {
                        let s0 = x[0].rem_euclid(tau) / tau * n as f64;
                        let s1 = x[1].rem_euclid(tau) / tau * n as f64;
                        let (i, a) = (s0.floor() as usize % n, s0 - s0.floor());
                        let (j, b) = (s1.floor() as usize % n, s1 - s1.floor());
                        let at = |i: usize, j: usize, c: usize| g[(i % n) * n + (j % n)][c];
                        let bil = |c: usize| {
                            (1.0 - a) * ((1.0 - b) * at(i, j, c) + b * at(i, j + 1, c)) + a * ((1.0 - b) * at(i + 1, j, c) + b * at(i + 1, j + 1, c))
                        };
                        [bil(0), bil(1)]
                    }
                    Manifold::Sphere2 { .. } => unreachable!(),
                }
            }
        }
    }

    pub fn controls_at(&self, t: f64, x: [f64; 2]) -> (f64, f64) {
        bang_bang(&self.reduction, x, self.gradient_at(t, x), self.u_max, self.v_max)
    }
}

impl FeedbackPolicy for BangBangPolicy {
    fn bounds(&self) -> (f64, f64) {
        (self.u_max, self.v_max)
    }

    fn control(&self, t: f64, state: PolicyState<'_>) -> (f64, f64) {
        match self.reduction.point(&state) {
            Ok(x) => self.controls_at(t, x),
            Err(_) => (self.u_max, -self.v_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    BangBangFromValue,
    Constant,
    Custom,
}

/// A feedback policy of one of the supported kinds.
pub enum Policy {
    BangBang(BangBangPolicy),
    Constant(ConstantControl),
    Custom(Box<dyn FeedbackPolicy + Send>),
}

impl fmt::Debug for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::BangBang(p) => p.fmt(f),
            Policy::Constant(c) => c.fmt(f),
            Policy::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Policy {
    pub fn kind(&self) -> PolicyKind {
        match self {
            Policy::BangBang(_) => PolicyKind::BangBangFromValue,
            Policy::Constant(_) => PolicyKind::Constant,
            Policy::Custom(_) => PolicyKind::Custom,
        }
    }
}

impl FeedbackPolicy for Policy {
    fn bounds(&self) -> (f64, f64) {
        match self {
            Policy::BangBang(p) => p.bounds(),
            Policy::Constant(p) => p.bounds(),
            Policy::Custom(p) => p.bounds(),
        }
    }

    fn control(&self, t: f64, state: PolicyState<'_>) -> (f64, f64) {
        match self {
            Policy::BangBang(p) => p.control(t, state),
            Policy::Constant(p) => p.control(t, state),
            Policy::Custom(p) => p.control(t, state),
        }
    }
}
