//! Dynamic quantum games driven by filtered states.
//!
//! A [`GameSpec`] fixes the detection scheme, the controlled Hamiltonian
//! `H0 + u H1 + v H2` and the cost operators. When the filtered diffusion lives on the
//! circle, the 2-torus or the Pauli sphere, [`Reduction`] maps it to a solver manifold and
//! the HJB-Isaacs equation is solved there; [`BangBangPolicy`] feeds the value gradient
//! back as controls, and [`evaluate_policy_mc`] scores any policy by simulation.

mod fields;
mod policy;
mod reduce;
mod solve;
mod spec;
mod two_atom;

use num_complex::Complex64;

use crate::error::check_dim;
use crate::filtering::hamiltonian_drift;
use crate::quantum::{raw_expectation, ComplexMatrix, ProjectiveState};
use crate::{Error, Result};

pub use fields::{build_nonzero_sum_fields, sgn, IsaacsField, NonZeroSumFields, NonZeroSumGame, ZeroSumGame};
pub use policy::{bang_bang, BangBangPolicy, Policy, PolicyKind};
pub use reduce::Reduction;
pub use solve::{evaluate_policy_mc, solve_nonzero_sum, solve_reduced, solve_zero_sum, McConfig, PayoffEstimate, ZeroSumSolution};
pub use spec::{CostPair, GameSpec, TwoAtomSpec};
pub use two_atom::two_atom_drift;

/// `i[w_k (HW)_0 - (HW)_k]`.
pub fn drift_field(h: &ComplexMatrix, w: &ProjectiveState) -> Result<Vec<Complex64>> {
    hamiltonian_drift(h, w)
}

/// `<J>_W` at the chart point `w`.
pub fn cost_rate(j: &ComplexMatrix, w: &ProjectiveState) -> Result<f64> {
    check_dim(j.dim(), w.n() + 1)?;
    Ok(raw_expectation(j, &w.lifted()).re)
}

/// `offset + amplitude cos(phi - phase)`: a qubit cost on the circle `|w| = C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleCost {
    pub offset: f64,
    pub amplitude: f64,
    pub phase: f64,
}

impl CircleCost {
    pub fn at(&self, phi: f64) -> f64 {
        self.offset + self.amplitude * (phi - self.phase).cos()
    }
}

/// Restriction of `<J>` to `w = C e^{i phi}` for a qubit cost `J`.
pub fn circle_cost(j: &ComplexMatrix, modulus: f64) -> Result<CircleCost> {
    check_dim(2, j.dim())?;
    j.require_hermitian("J")?;
    if !(modulus.is_finite() && modulus > 0.0) {
        return Err(Error::domain("circle modulus must be positive"));
    }
    let m = j.inner();
    let c2 = modulus * modulus;
    let n = 1.0 + c2;
    Ok(CircleCost {
        offset: (m[(0, 0)].re + c2 * m[(1, 1)].re) / n,
        amplitude: 2.0 * modulus * m[(0, 1)].norm() / n,
        phase: -m[(0, 1)].arg(),
    })
}

fn chart_pairing(b: &[Complex64], grad: &[f64]) -> f64 {
    b.iter().zip(grad.chunks(2)).map(|(z, g)| z.re * g[0] + z.im * g[1]).sum()
}

/// `<J>_W + U |<b1, grad>| - V |<b2, grad>|` with `b_i = drift_field(H_i, w)`.
///
/// `grad` holds the real partials `(d/dx_1, d/dy_1, ..., d/dx_n, d/dy_n)`.
pub fn isaacs_hamiltonian(spec: &GameSpec, w: &ProjectiveState, grad: &[f64]) -> Result<f64> {
    check_dim(2 * w.n(), grad.len())?;
    let j = cost_rate(&spec.costs.running, w)?;
    let b1 = drift_field(&spec.hamiltonian.h1, w)?;
    let b2 = drift_field(&spec.hamiltonian.h2, w)?;
    Ok(j + spec.u_max * chart_pairing(&b1, grad).abs() - spec.v_max * chart_pairing(&b2, grad).abs())
}

/// The qubit game whose reduction is `S_t + 1/2 S'' + (U - V)|S'| + cos(phi) = 0` on the
/// circle `|w| = 1`: rate-one diagonal detection, `H1 = diag(1, 0)`, `H2 = diag(0, 1)`,
/// running cost `sigma_x` and no terminal cost.
pub fn circle_game(u_max: f64, v_max: f64, horizon: f64) -> Result<GameSpec> {
    use crate::filtering::{ControlledHamiltonian, DetectionScheme};
    let ham = ControlledHamiltonian::new(
        ComplexMatrix::zeros(2),
        ComplexMatrix::real_diagonal(&[1.0, 0.0])?,
        ComplexMatrix::real_diagonal(&[0.0, 1.0])?,
    )?;
    let costs = CostPair::new(crate::quantum::sigma_x(), ComplexMatrix::zeros(2))?;
    GameSpec::new(DetectionScheme::torus_diagonal(&[1.0])?, ham, u_max, v_max, costs, horizon)
}

/// Long-run payoff per unit time of a game that reduces to the circle with no free drift:
/// `offset + amplitude * lambda((U|s1| - V|s2|) / kappa)` for the cost
/// `offset + amplitude cos(phi - phase)`. `None` for other reductions.
pub fn circle_ergodic_rate(spec: &GameSpec) -> Result<Option<f64>> {
    let red = Reduction::from_game(spec)?;
    let Some((modulus, speed)) = red.circle_speeds() else {
        return Ok(None);
    };
    if speed[0] != 0.0 {
        return Ok(None);
    }
    let alpha = spec.u_max * speed[1].abs() - spec.v_max * speed[2].abs();
    let cost = circle_cost(&spec.costs.running, modulus)?;
    Ok(Some(cost.offset + cost.amplitude * crate::pde::circle_lambda_scaled(alpha, red.kappa())))
}
