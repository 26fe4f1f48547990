use super::reduce::{Reduction, FREE, PLAYER_I, PLAYER_II};
use super::spec::{CostPair, GameSpec, TwoAtomSpec};
use crate::pde::{CoupledField, HamiltonianField, ManifoldGrid};
use crate::quantum::ComplexMatrix;
use crate::Result;

/// Sign with the tie `sgn(0) = +1`.
pub fn sgn(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// Zero-sum game on a solver manifold.
#[derive(Debug, Clone)]
pub struct ZeroSumGame {
    pub reduction: Reduction,
    pub u_max: f64,
    pub v_max: f64,
    pub costs: CostPair,
    pub horizon: f64,
}

impl ZeroSumGame {
    pub fn from_game(spec: &GameSpec) -> Result<Self> {
        Ok(Self {
            reduction: Reduction::from_game(spec)?,
            u_max: spec.u_max,
            v_max: spec.v_max,
            costs: spec.costs.clone(),
            horizon: spec.horizon,
        })
    }

    /// Player I's costs on the product torus of two qubits.
    pub fn from_two_atom(spec: &TwoAtomSpec) -> Result<Self> {
        Ok(Self {
            reduction: Reduction::from_two_atom(spec)?,
            u_max: spec.u_max,
            v_max: spec.v_max,
            costs: spec.costs_i.clone(),
            horizon: spec.horizon,
        })
    }
}

/// `H(x, p) = <J>(x) + <b0, p> + U |<b1, p>| - V |<b2, p>|` on grid coordinates.
#[derive(Debug, Clone)]
pub struct IsaacsField {
    reduction: Reduction,
    u_max: f64,
    v_max: f64,
    running: ComplexMatrix,
    lipschitz: f64,
}

impl IsaacsField {
    pub fn new(game: &ZeroSumGame, grid: &ManifoldGrid) -> Self {
        let r = &game.reduction;
        let lipschitz = r.max_speed(FREE, grid) + game.u_max * r.max_speed(PLAYER_I, grid) + game.v_max * r.max_speed(PLAYER_II, grid);
        Self { reduction: r.clone(), u_max: game.u_max, v_max: game.v_max, running: game.costs.running.clone(), lipschitz }
    }
}

impl HamiltonianField for IsaacsField {
    fn eval(&self, x: [f64; 2], p: [f64; 2]) -> f64 {
        let r = &self.reduction;
        r.expectation(&self.running, x) + r.pairing(FREE, x, p) + self.u_max * r.pairing(PLAYER_I, x, p).abs()
            - self.v_max * r.pairing(PLAYER_II, x, p).abs()
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// Two-player game with separate payoffs, both maximised.
#[derive(Debug, Clone)]
pub struct NonZeroSumGame {
    pub reduction: Reduction,
    pub u_max: f64,
    pub v_max: f64,
    pub costs: [CostPair; 2],
    pub horizon: f64,
}

impl NonZeroSumGame {
    /// Player I keeps the game's costs, player II gets `costs_ii`.
    pub fn from_game(spec: &GameSpec, costs_ii: CostPair) -> Result<Self> {
        crate::error::check_dim(spec.costs.dim(), costs_ii.dim())?;
        Ok(Self {
            reduction: Reduction::from_game(spec)?,
            u_max: spec.u_max,
            v_max: spec.v_max,
            costs: [spec.costs.clone(), costs_ii],
            horizon: spec.horizon,
        })
    }

    pub fn from_two_atom(spec: &TwoAtomSpec) -> Result<Self> {
        Ok(Self {
            reduction: Reduction::from_two_atom(spec)?,
            u_max: spec.u_max,
            v_max: spec.v_max,
            costs: [spec.costs_i.clone(), spec.costs_ii.clone()],
            horizon: spec.horizon,
        })
    }
}

/// Coupled Hamiltonians of a non-zero-sum game. Each player's control is bang-bang in the
/// sign of its own value gradient, `u = U sgn<b1, dS^I>`, `v = V sgn<b2, dS^II>`, and both
/// controls enter both equations.
#[derive(Debug, Clone)]
pub struct NonZeroSumFields {
    reduction: Reduction,
    u_max: f64,
    v_max: f64,
    running: [ComplexMatrix; 2],
    lipschitz: f64,
}

impl NonZeroSumFields {
    /// Controls selected at a point from both players' gradients.
    pub fn controls(&self, x: [f64; 2], p1: [f64; 2], p2: [f64; 2]) -> (f64, f64) {
        let r = &self.reduction;
        (self.u_max * sgn(r.pairing(PLAYER_I, x, p1)), self.v_max * sgn(r.pairing(PLAYER_II, x, p2)))
    }
}

impl CoupledField for NonZeroSumFields {
    fn eval(&self, x: [f64; 2], p1: [f64; 2], p2: [f64; 2]) -> [f64; 2] {
        let r = &self.reduction;
        let (u, v) = self.controls(x, p1, p2);
        let one = |c: usize, p: [f64; 2]| {
            r.expectation(&self.running[c], x) + r.pairing(FREE, x, p) + u * r.pairing(PLAYER_I, x, p) + v * r.pairing(PLAYER_II, x, p)
        };
        [one(0, p1), one(1, p2)]
    }

    /// Bound on the speed of the controlled drift. The sign switches make the pair only
    /// piecewise Lipschitz across `<b, dS> = 0`.
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

pub fn build_nonzero_sum_fields(game: &NonZeroSumGame, grid: &ManifoldGrid) -> NonZeroSumFields {
    let r = &game.reduction;
    let lipschitz = r.max_speed(FREE, grid) + game.u_max * r.max_speed(PLAYER_I, grid) + game.v_max * r.max_speed(PLAYER_II, grid);
    NonZeroSumFields {
        reduction: r.clone(),
        u_max: game.u_max,
        v_max: game.v_max,
        running: [game.costs[0].running.clone(), game.costs[1].running.clone()],
        lipschitz,
    }
}
