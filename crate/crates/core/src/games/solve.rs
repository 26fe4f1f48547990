use super::fields::{build_nonzero_sum_fields, IsaacsField, NonZeroSumGame, ZeroSumGame};
use super::policy::BangBangPolicy;
use super::spec::GameSpec;
use crate::exec::{map_indexed, mean_stderr, Execution};
use crate::filtering::trajectory::Engine;
use crate::filtering::{FeedbackPolicy, Representation, SchemeKind, TrajectoryConfig};
use crate::pde::{mild_solve, vector_mild_solve, GridFunction, MildConfig, ValueFunction};
use crate::quantum::{raw_expectation, ProjectiveState};
use crate::{Error, Result};

/// Value function of a zero-sum game and the extracted bang-bang policy.
#[derive(Debug)]
pub struct ZeroSumSolution {
    pub value: ValueFunction,
    pub policy: BangBangPolicy,
}

/// Solves a reduced zero-sum game with the mild solver; `resolution` is the node count per
/// angle, or `lmax` on the sphere.
pub fn solve_reduced(game: &ZeroSumGame, resolution: usize, config: &MildConfig) -> Result<ZeroSumSolution> {
    let grid = game.reduction.grid(resolution)?;
    let terminal = GridFunction::from_fn(&grid, |x| game.reduction.expectation(&game.costs.terminal, x))?;
    let field = IsaacsField::new(game, &grid);
    let value = mild_solve(&grid, &terminal, &field, game.horizon, config)?;
    let policy = BangBangPolicy::from_value(&game.reduction, &value, game.u_max, game.v_max);
    Ok(ZeroSumSolution { value, policy })
}

/// Solves the HJB-Isaacs equation of a game whose dynamics reduce to a solver manifold.
pub fn solve_zero_sum(spec: &GameSpec, resolution: usize, config: &MildConfig) -> Result<ZeroSumSolution> {
    solve_reduced(&ZeroSumGame::from_game(spec)?, resolution, config)
}

/// Solves the coupled system of a non-zero-sum game; returns `(S^I, S^II)`.
pub fn solve_nonzero_sum(game: &NonZeroSumGame, resolution: usize, config: &MildConfig) -> Result<(ValueFunction, ValueFunction)> {
    let grid = game.reduction.grid(resolution)?;
    let r = &game.reduction;
    let t1 = GridFunction::from_fn(&grid, |x| r.expectation(&game.costs[0].terminal, x))?;
    let t2 = GridFunction::from_fn(&grid, |x| r.expectation(&game.costs[1].terminal, x))?;
    let fields = build_nonzero_sum_fields(game, &grid);
    vector_mild_solve(&grid, (&t1, &t2), &fields, game.horizon, config)
}

#[derive(Debug, Clone, PartialEq)]
pub struct McConfig {
    pub dt: f64,
    pub paths: usize,
    pub seed: u64,
    /// State representation of the simulated filter; see [`Representation`].
    pub representation: Representation,
    pub exec: Execution,
}

impl McConfig {
    pub fn new(dt: f64, paths: usize, seed: u64) -> Self {
        Self { dt, paths, seed, representation: Representation::Auto, exec: Execution::default() }
    }
}

/// Monte Carlo payoff of a policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffEstimate {
    pub mean: f64,
    pub stderr: f64,
    /// Paths that completed; chart exits are excluded from the mean.
    pub paths: usize,
    pub chart_exits: usize,
    pub chart_exit_fraction: f64,
    /// Set when at least 1% of the paths left the chart.
    pub flagged: bool,
}

/// Simulates the filtered state under `policy` and averages
/// `int_0^T <J> dt + <F>_T` (left-point rule), with standard innovation noise.
///
/// `Representation::Auto` integrates torus schemes in angle form and every other scheme in
/// the renormalised state vector, which cannot leave a chart.
pub fn evaluate_policy_mc(
    spec: &GameSpec,
    policy: &dyn FeedbackPolicy,
    initial: &ProjectiveState,
    config: &McConfig,
) -> Result<PayoffEstimate> {
    if config.paths == 0 {
        return Err(Error::domain("need at least one path"));
    }
    let (ub, vb) = policy.bounds();
    if ub > spec.u_max * (1.0 + 1e-12) || vb > spec.v_max * (1.0 + 1e-12) {
        return Err(Error::domain("policy bounds exceed the game's control sets"));
    }
    let mut tc = TrajectoryConfig::new(config.dt, spec.horizon, config.seed)?;
    tc.representation = match (config.representation, spec.scheme.kind()) {
        (Representation::Auto, SchemeKind::TorusDiagonal | SchemeKind::EuclideanColumn) => Representation::Auto,
        // Chart paths near the divisor exit and would bias the mean.
        (Representation::Auto, _) => Representation::Chi,
        (r, _) => r,
    };
    let engine = Engine::new(&spec.scheme, &spec.hamiltonian, &tc)?;
    let steps = tc.steps();
    let results: Vec<Result<Option<f64>>> = map_indexed(config.exec, config.paths, |i| {
        let mut state = engine.initial(initial)?;
        let mut rng = engine.rng(i as u64);
        let mut dy = vec![0.0; spec.scheme.channels()];
        let mut payoff = 0.0;
        for k in 0..steps {
            payoff += raw_expectation(&spec.costs.running, &state.vector()).re * tc.dt;
            match engine.advance(&mut state, k as f64 * tc.dt, policy, &mut rng, &mut dy) {
                Ok(_) => {}
                Err(Error::ChartExit { .. }) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(payoff + raw_expectation(&spec.costs.terminal, &state.vector()).re))
    });
    let mut samples = Vec::with_capacity(config.paths);
    let mut exits = 0;
    for r in results {
        match r? {
            Some(p) => samples.push(p),
            None => exits += 1,
        }
    }
    let (mean, stderr) = if samples.is_empty() { (f64::NAN, f64::NAN) } else { mean_stderr(&samples) };
    let fraction = exits as f64 / config.paths as f64;
    Ok(PayoffEstimate { mean, stderr, paths: samples.len(), chart_exits: exits, chart_exit_fraction: fraction, flagged: fraction >= 0.01 })
}
