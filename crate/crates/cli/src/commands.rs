use dqg::analysis::{analyze_scheme, local_coefficients, sample_chart_point};
use dqg::exec::Execution;
use dqg::filtering::{
    simulate_trajectory, ConstantControl, DetectionScheme, FeedbackPolicy, NoiseKind, PolicyState, Representation,
    SchemeKind, TrajectoryConfig,
};
use dqg::games::{
    circle_ergodic_rate, evaluate_policy_mc, solve_nonzero_sum, two_atom_drift, BangBangPolicy, GameSpec, IsaacsField,
    McConfig, NonZeroSumGame, ZeroSumGame,
};
use dqg::pde::{
    circle_lambda_scaled, fd_solve, mild_solve, stationary_solve_circle, DiscountedCircle, FdConfig, GridFunction,
    Manifold, ManifoldGrid, MildConfig, ValueFunction,
};
use dqg::quantum::{ComplexMatrix, ProjectiveState};
use dqg::rng::path_rng;
use dqg::{Complex64, Error};
use serde_json::{json, Value};

use crate::config::{
    chart_state, AnalyzeConfig, CircleConfig, Config, ConfigError, GameConfig, HamiltonianConfig, McSection, Method,
    MatrixSpec, PolicyChoice, SchemeConfig, SimulateConfig, SolverConfig, TwoAtomConfig, DEFAULT_MILD_DT,
};
use crate::output::{num, RunDir};

#[derive(Debug)]
pub enum RunError {
    Config(String),
    /// A numerical method failed; `report` is written to `failure.json`.
    Numerical { message: String, report: Value },
    Io(std::io::Error),
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        let report = match &e {
            Error::Divergence { residuals } => json!({"kind": "divergence", "residuals": residuals.iter().map(|r| num(*r)).collect::<Vec<_>>()}),
            Error::Cfl { dt, limit } => json!({"kind": "stability", "dt": num(*dt), "limit": num(*limit)}),
            Error::ChartExit { norm, guard } => json!({"kind": "chart-exit", "norm": num(*norm), "guard": num(*guard)}),
            Error::Degenerate(msg) => json!({"kind": "degenerate", "detail": msg}),
            _ => return RunError::Config(message),
        };
        RunError::Numerical { message, report }
    }
}

pub type Outcome = Result<(), RunError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    AnalyzeScheme,
    SolveHjb,
    ExactCircle,
    PolicyEval,
    TwoAtom,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::AnalyzeScheme => "analyze-scheme",
            Command::SolveHjb => "solve-hjb",
            Command::ExactCircle => "exact-circle",
            Command::PolicyEval => "policy-eval",
            Command::TwoAtom => "two-atom",
        }
    }
}

fn is_torus(scheme: &SchemeConfig) -> bool {
    matches!(scheme, SchemeConfig::Torus { .. })
}

/// Keeps the sections `command` reads, fills them with defaults and pins every implicit
/// choice, so the resolved file alone reproduces the run.
pub fn resolve(command: Command, file: Config, seed: Option<u64>) -> Result<Config, ConfigError> {
    let mut out = Config { seed: Some(seed.or(file.seed).unwrap_or(0)), ..Config::default() };
    let scheme = file.scheme.clone().unwrap_or_default();
    let dim = scheme.build()?.dim();
    let hamiltonian = |h: Option<HamiltonianConfig>| {
        h.unwrap_or_else(|| {
            if dim == 2 {
                HamiltonianConfig::default()
            } else {
                let z = MatrixSpec::named("zero");
                HamiltonianConfig { h0: z.clone(), h1: z.clone(), h2: z }
            }
        })
    };
    let game = |g: Option<GameConfig>| match g {
        Some(g) => Ok(g),
        None if dim == 2 => Ok(GameConfig::default()),
        None => Err(ConfigError(format!("no default game for dimension {dim}; give a [game] section"))),
    };
    let solver = |s: Option<SolverConfig>| {
        let mut s = s.unwrap_or_default();
        if s.method == Method::Mild && s.dt.is_none() {
            s.dt = Some(DEFAULT_MILD_DT);
        }
        s
    };
    match command {
        Command::Simulate => {
            let mut sim = file.simulate.unwrap_or_default();
            if sim.initial.is_empty() {
                let fill = if is_torus(&scheme) { [1.0, 0.0] } else { [0.0, 0.0] };
                sim.initial = vec![fill; dim - 1];
            }
            out.hamiltonian = Some(hamiltonian(file.hamiltonian));
            out.simulate = Some(sim);
            out.scheme = Some(scheme);
        }
        Command::AnalyzeScheme => {
            out.scheme = Some(scheme);
            out.analyze = Some(file.analyze.unwrap_or_default());
        }
        Command::SolveHjb => {
            out.hamiltonian = Some(hamiltonian(file.hamiltonian));
            out.game = Some(game(file.game)?);
            out.solver = Some(solver(file.solver));
            out.scheme = Some(scheme);
        }
        Command::PolicyEval => {
            let g = game(file.game)?;
            let mut mc = file.mc.unwrap_or_default();
            if mc.initial.is_empty() {
                let point = if is_torus(&scheme) {
                    g.moduli.clone().unwrap_or_else(|| vec![1.0; dim - 1]).into_iter().map(|m| [m, 0.0]).collect()
                } else {
                    vec![[0.0, 0.0]; dim - 1]
                };
                mc.initial = vec![point];
            }
            out.hamiltonian = Some(hamiltonian(file.hamiltonian));
            out.game = Some(g);
            out.solver = Some(solver(file.solver));
            out.mc = Some(mc);
            out.scheme = Some(scheme);
        }
        Command::ExactCircle => out.circle = Some(file.circle.unwrap_or_default()),
        Command::TwoAtom => out.two_atom = Some(file.two_atom.unwrap_or_default()),
    }
    Ok(out)
}

pub fn run(command: Command, cfg: &Config, dir: &RunDir) -> Outcome {
    let seed = cfg.seed.unwrap_or(0);
    match command {
        Command::Simulate => simulate(cfg, seed, dir),
        Command::AnalyzeScheme => analyze(cfg, seed, dir),
        Command::SolveHjb => solve_hjb(cfg, dir),
        Command::ExactCircle => exact_circle(cfg.circle.as_ref().expect("resolved"), dir),
        Command::PolicyEval => policy_eval(cfg, seed, dir),
        Command::TwoAtom => two_atom(cfg.two_atom.as_ref().expect("resolved"), seed, dir),
    }
}

fn coord_header(n: usize, prefix: &str) -> Vec<String> {
    (1..=n).flat_map(|k| [format!("re_{prefix}{k}"), format!("im_{prefix}{k}")]).collect()
}

fn complex_cells(z: &[Complex64]) -> impl Iterator<Item = f64> + '_ {
    z.iter().flat_map(|c| [c.re, c.im])
}

fn simulate(cfg: &Config, seed: u64, dir: &RunDir) -> Outcome {
    let scheme = cfg.scheme.as_ref().expect("resolved").build()?;
    let ham = cfg.hamiltonian.as_ref().expect("resolved").build(scheme.dim())?;
    let sim: &SimulateConfig = cfg.simulate.as_ref().expect("resolved");
    let initial = chart_state(&sim.initial, scheme.dim() - 1, "simulate.initial")?;
    let control = ConstantControl { u: sim.u, v: sim.v };
    let mut tc = TrajectoryConfig::new(sim.dt, sim.horizon, seed)?;
    tc.noise_kind = sim.noise.into();
    tc.representation = sim.representation.into();
    if sim.paths == 0 {
        return Err(RunError::Config("simulate.paths must be positive".into()));
    }
    let mut paths = Vec::new();
    for p in 0..sim.paths {
        tc.stream = p as u64;
        let traj = simulate_trajectory(&scheme, &ham, &control, &initial, &tc)?;
        traj.write_csv(dir.file(&format!("trajectory_{p:04}.csv"))?)?;
        paths.push(json!({
            "path": p,
            "steps": traj.times.len() - 1,
            "final_time": num(*traj.times.last().expect("non-empty trajectory")),
            "truncation": traj.truncation.map(|t| json!({"time": num(t.time), "norm": num(t.norm)})),
        }));
    }
    let truncated = paths.iter().filter(|p| !p["truncation"].is_null()).count();
    dir.summary(json!({
        "scheme": scheme_name(&scheme),
        "paths": paths,
        "steps": tc.steps(),
        "truncated_paths": truncated,
    }))?;
    Ok(())
}

fn scheme_name(scheme: &DetectionScheme) -> String {
    match scheme.kind() {
        SchemeKind::PauliSphere => "pauli".into(),
        SchemeKind::GellMannProjective => format!("gell-mann-{}", scheme.dim()),
        SchemeKind::TorusDiagonal => format!("torus-{}", scheme.dim() - 1),
        SchemeKind::EuclideanColumn => format!("euclidean-{}", scheme.dim() - 1),
        SchemeKind::Custom => "custom".into(),
    }
}

fn analyze(cfg: &Config, seed: u64, dir: &RunDir) -> Outcome {
    let scheme = cfg.scheme.as_ref().expect("resolved").build()?;
    let a: &AnalyzeConfig = cfg.analyze.as_ref().expect("resolved");
    if a.points == 0 || !(a.radius.is_finite() && a.radius > 0.0) {
        return Err(RunError::Config("analyze: points and radius must be positive".into()));
    }
    let report = analyze_scheme(&scheme, a.points, a.radius, seed)?;
    let n = scheme.dim() - 1;
    let zero = ComplexMatrix::zeros(scheme.dim());
    let mut rng = path_rng(seed, 1);
    let mut rows = Vec::with_capacity(a.points);
    for i in 0..a.points {
        let w = sample_chart_point(&mut rng, n, a.radius);
        let lc = local_coefficients(&scheme, &zero, &w, NoiseKind::Output)?;
        let mut row = vec![i as f64];
        row.extend(complex_cells(w.coords()));
        row.extend(&lc.drift);
        row.push(lc.quadratic_variation.trace());
        rows.push(row);
    }
    let mut header = vec!["index".to_string()];
    header.extend(coord_header(n, "w"));
    header.extend((1..=n).flat_map(|k| [format!("drift_re_w{k}"), format!("drift_im_w{k}")]));
    header.push("qv_trace".into());
    dir.csv("samples.csv", &header, rows)?;

    let iso = report.isothermal.as_ref();
    dir.summary(json!({
        "scheme": report.scheme,
        "points": report.points_tested,
        "radius": num(report.radius),
        "max_drift_residual": num(report.max_drift_residual),
        "max_variance_residual": num(report.max_variance_residual),
        "innovation_invariant": report.innovation_invariant,
        "isothermal": iso.map(|r| r.is_isothermal),
        "a": iso.map(|r| num(r.scale)),
        "first_order_cancellation": iso.map(|r| r.first_order_cancellation),
        "failing_pairs": iso.map(|r| r.failing_pairs.clone()),
    }))?;
    println!(
        "{}: isothermal = {}, a = {}",
        report.scheme,
        iso.map_or("n/a".to_string(), |r| r.is_isothermal.to_string()),
        iso.map_or("n/a".to_string(), |r| r.scale.to_string())
    );
    Ok(())
}

fn game_spec(cfg: &Config) -> Result<GameSpec, RunError> {
    let scheme = cfg.scheme.as_ref().expect("resolved").build()?;
    let ham = cfg.hamiltonian.as_ref().expect("resolved").build(scheme.dim())?;
    Ok(cfg.game.as_ref().expect("resolved").build(scheme, ham)?)
}

fn mild_config(s: &SolverConfig) -> MildConfig {
    MildConfig {
        dt: s.dt.unwrap_or(DEFAULT_MILD_DT),
        tolerance: s.tolerance,
        max_iterations: s.max_iterations,
        discount: s.discount,
        window: s.window,
        exec: Execution::default(),
    }
}

struct Solved {
    game: ZeroSumGame,
    value: ValueFunction,
}

fn solve_zero_sum_value(spec: &GameSpec, s: &SolverConfig) -> Result<Solved, RunError> {
    let game = ZeroSumGame::from_game(spec)?;
    let grid = game.reduction.grid(s.resolution)?;
    let terminal = GridFunction::from_fn(&grid, |x| game.reduction.expectation(&game.costs.terminal, x))?;
    let field = IsaacsField::new(&game, &grid);
    let value = match s.method {
        Method::Mild => mild_solve(&grid, &terminal, &field, game.horizon, &mild_config(s))?,
        Method::Fd => {
            let fd = FdConfig { dt: s.dt, discount: s.discount, snapshots: s.snapshots.max(1), exec: Execution::default() };
            fd_solve(&grid, &terminal, &field, game.horizon, &fd)?
        }
    };
    Ok(Solved { game, value })
}

/// Indices of at most `snapshots + 1` evenly spread slices, always including both ends.
fn snapshot_indices(slices: usize, snapshots: usize) -> Vec<usize> {
    let last = slices - 1;
    let k = snapshots.clamp(1, last.max(1));
    let mut idx: Vec<usize> = (0..=k).map(|i| (i * last + k / 2) / k).collect();
    idx.dedup();
    idx
}

fn manifold_json(grid: &ManifoldGrid) -> Value {
    let (name, size) = match grid.manifold() {
        Manifold::Circle { n } => ("circle", n),
        Manifold::Torus2 { n } => ("torus2", n),
        Manifold::Sphere2 { lmax } => ("sphere2", lmax),
    };
    json!({"manifold": name, "resolution": size, "nodes": grid.len(), "kappa": num(grid.kappa())})
}

fn value_rows<'a>(values: &'a [&'a ValueFunction], snapshots: usize) -> impl Iterator<Item = Vec<f64>> + 'a {
    let v0 = values[0];
    snapshot_indices(v0.times().len(), snapshots).into_iter().flat_map(move |i| {
        let t = v0.times()[i];
        v0.grid().nodes().iter().enumerate().map(move |(j, x)| {
            let mut row = vec![t, x[0], x[1]];
            row.extend(values.iter().map(|v| v.slices()[i].values()[j]));
            row
        })
    })
}

fn initial_stats(v: &ValueFunction) -> Value {
    let s = v.initial().values();
    json!({"min": num(v.initial().min()), "max": num(v.initial().max()), "mean": num(s.iter().sum::<f64>() / s.len() as f64)})
}

fn solve_hjb(cfg: &Config, dir: &RunDir) -> Outcome {
    let spec = game_spec(cfg)?;
    let s = cfg.solver.as_ref().expect("resolved");
    let g = cfg.game.as_ref().expect("resolved");
    let header = |cols: &[&str]| -> Vec<String> { ["t", "x0", "x1"].iter().chain(cols).map(|c| c.to_string()).collect() };
    if let Some(costs_ii) = g.costs_ii(spec.hamiltonian.dim())? {
        if s.method == Method::Fd {
            return Err(RunError::Config("the fd solver handles zero-sum games only; use method = \"mild\"".into()));
        }
        let game = NonZeroSumGame::from_game(&spec, costs_ii)?;
        let (v1, v2) = solve_nonzero_sum(&game, s.resolution, &mild_config(s))?;
        dir.csv("value.csv", &header(&["S_I", "S_II"]), value_rows(&[&v1, &v2], s.snapshots))?;
        dir.summary(json!({
            "game": "non-zero-sum",
            "grid": manifold_json(v1.grid()),
            "method": "mild",
            "dt": num(mild_config(s).dt),
            "iterations": v1.iterations(),
            "final_residual": v1.residuals().last().map(|r| num(*r)),
            "value_initial": [initial_stats(&v1), initial_stats(&v2)],
        }))?;
        return Ok(());
    }
    let solved = solve_zero_sum_value(&spec, s)?;
    let v = &solved.value;
    dir.csv("value.csv", &header(&["S"]), value_rows(&[v], s.snapshots))?;
    let dt = v.times().windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    dir.summary(json!({
        "game": "zero-sum",
        "grid": manifold_json(v.grid()),
        "method": match s.method { Method::Mild => "mild", Method::Fd => "fd" },
        "dt": num(if s.method == Method::Mild { mild_config(s).dt } else { dt }),
        "iterations": v.iterations(),
        "final_residual": v.residuals().last().map(|r| num(*r)),
        "value_initial": initial_stats(v),
        "ergodic_rate": circle_ergodic_rate(&spec)?.map(num),
        "kappa": num(solved.game.reduction.kappa()),
    }))?;
    Ok(())
}

fn exact_circle(c: &CircleConfig, dir: &RunDir) -> Outcome {
    if !(c.kappa.is_finite() && c.kappa > 0.0) || c.n < 4 || !c.n.is_multiple_of(2) {
        return Err(RunError::Config("circle: kappa must be positive and n an even number >= 4".into()));
    }
    let lambda = circle_lambda_scaled(c.alpha, c.kappa);
    let grid = ManifoldGrid::circle(c.n, c.kappa)?;
    let stationary = stationary_solve_circle(c.alpha, &grid)?;
    let nodes = grid.nodes();
    dir.csv(
        "stationary.csv",
        &["phi".into(), "S".into()],
        nodes.iter().zip(stationary.value.values()).map(|(x, s)| vec![x[0], *s]),
    )?;
    let discounted = match c.delta {
        None => Value::Null,
        Some(delta) => {
            let d = DiscountedCircle::new(c.alpha, delta)?;
            let rows: Vec<Vec<f64>> = nodes.iter().map(|x| vec![x[0], d.value(x[0]), d.derivative(x[0]), d.residual(x[0])]).collect();
            let max_residual = rows.iter().map(|r| r[3].abs()).fold(0.0, f64::max);
            dir.csv("discounted.csv", &["phi".into(), "S".into(), "dS".into(), "residual".into()], rows)?;
            json!({
                "delta": num(delta),
                "a1": num(d.a1), "a2": num(d.a2), "a": num(d.a), "b": num(d.b),
                "A_scaled": num(d.a_scaled), "B": num(d.b_coef),
                "max_residual": num(max_residual),
            })
        }
    };
    dir.summary(json!({
        "alpha": num(c.alpha),
        "kappa": num(c.kappa),
        "lambda": num(lambda),
        "lambda_shooting": num(stationary.lambda),
        "shooting_iterations": stationary.shooting_iterations,
        "discounted": discounted,
    }))?;
    println!("lambda = {lambda:.7}");
    Ok(())
}

fn policy_eval(cfg: &Config, seed: u64, dir: &RunDir) -> Outcome {
    let spec = game_spec(cfg)?;
    let s = cfg.solver.as_ref().expect("resolved");
    let mc: &McSection = cfg.mc.as_ref().expect("resolved");
    let Solved { game, value } = solve_zero_sum_value(&spec, s)?;
    let bang_bang;
    let constant = ConstantControl { u: mc.u, v: mc.v };
    let policy: &dyn FeedbackPolicy = match mc.policy {
        PolicyChoice::BangBang => {
            bang_bang = BangBangPolicy::from_value(&game.reduction, &value, spec.u_max, spec.v_max);
            &bang_bang
        }
        PolicyChoice::Constant => &constant,
    };
    let mc_cfg = McConfig { dt: mc.dt, paths: mc.paths, seed, representation: mc.representation.into(), exec: Execution::default() };
    let n = spec.hamiltonian.dim() - 1;
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (i, p) in mc.initial.iter().enumerate() {
        let w: ProjectiveState = chart_state(p, n, "mc.initial")?;
        let x = game.reduction.point(&PolicyState::Chart(&w))?;
        let pde = value.initial().evaluate(x);
        let est = evaluate_policy_mc(&spec, policy, &w, &mc_cfg)?;
        let mut row = vec![i as f64];
        row.extend(complex_cells(w.coords()));
        row.extend([pde, est.mean, est.stderr, est.paths as f64, est.chart_exits as f64]);
        rows.push(row);
        points.push(json!({
            "value": num(pde),
            "mc_mean": num(est.mean),
            "mc_stderr": num(est.stderr),
            "chart_exit_fraction": num(est.chart_exit_fraction),
            "flagged": est.flagged,
        }));
    }
    let mut header = vec!["index".to_string()];
    header.extend(coord_header(n, "w"));
    header.extend(["value", "mc_mean", "mc_stderr", "paths", "chart_exits"].map(String::from));
    dir.csv("mc.csv", &header, rows)?;
    let grid = value.grid();
    dir.csv(
        "value.csv",
        &["x0".into(), "x1".into(), "S".into()],
        grid.nodes().iter().zip(value.initial().values()).map(|(x, s)| vec![x[0], x[1], *s]),
    )?;
    let first = points[0].clone();
    dir.summary(json!({
        "policy": match mc.policy { PolicyChoice::BangBang => "bang-bang", PolicyChoice::Constant => "constant" },
        "value": first["value"],
        "lambda": circle_ergodic_rate(&spec)?.map(num),
        "mc_mean": first["mc_mean"],
        "mc_stderr": first["mc_stderr"],
        "chart_exit_fraction": first["chart_exit_fraction"],
        "flagged": first["flagged"],
        "points": points,
        "grid": manifold_json(grid),
    }))?;
    Ok(())
}

/// Flattened label `w<j><k>` of chart coordinate `idx` of `C^d (x) C^d`.
fn pair_label(idx: usize, d: usize) -> String {
    format!("{}{}", idx / d, idx % d)
}

fn two_atom(c: &TwoAtomConfig, seed: u64, dir: &RunDir) -> Outcome {
    let d = c.atom_dim()?;
    let spec = c.build(d)?;
    let n = d * d - 1;
    if c.samples == 0 || !(c.radius.is_finite() && c.radius > 0.0) {
        return Err(RunError::Config("two_atom: samples and radius must be positive".into()));
    }
    if c.u.abs() > c.u_max || c.v.abs() > c.v_max {
        return Err(RunError::Config("two_atom: constant controls exceed u_max / v_max".into()));
    }

    let mut rng = path_rng(seed, 0);
    let mut rows = Vec::with_capacity(c.samples);
    let mut max_drift: f64 = 0.0;
    for i in 0..c.samples {
        let w = sample_chart_point(&mut rng, n, c.radius);
        let b = two_atom_drift(&spec, c.u, c.v, &w)?;
        max_drift = max_drift.max(b.iter().map(|z| z.norm()).fold(0.0, f64::max));
        let mut row = vec![i as f64];
        row.extend(complex_cells(w.coords()));
        row.extend(complex_cells(&b));
        rows.push(row);
    }
    let mut header = vec!["index".to_string()];
    for prefix in ["w", "b"] {
        header.extend((1..=n).flat_map(|k| {
            let l = pair_label(k, d);
            [format!("re_{prefix}{l}"), format!("im_{prefix}{l}")]
        }));
    }
    dir.csv("drift.csv", &header, rows)?;

    // Product state (e0 + m1 e1) (x) (e0 + m2 e1), with m1 = |w10| and m2 = |w01|.
    let factor = |m: f64| -> Vec<f64> { (0..d).map(|j| [1.0, m][..].get(j).copied().unwrap_or(0.0)).collect() };
    let (x, y) = (factor(c.moduli[0]), factor(c.moduli[1]));
    let w0 = ProjectiveState::new((1..=n).map(|k| Complex64::new(x[k / d] * y[k % d], 0.0)).collect())?;
    let scheme = spec.detection_scheme()?;
    let ham = spec.hamiltonian()?;
    let mut tc = TrajectoryConfig::new(c.dt, c.horizon, seed)?;
    tc.representation = Representation::Projective;
    let mut truncated = 0;
    for p in 0..c.paths {
        tc.stream = p as u64;
        let traj = simulate_trajectory(&scheme, &ham, &ConstantControl { u: c.u, v: c.v }, &w0, &tc)?;
        truncated += usize::from(traj.truncation.is_some());
        traj.write_csv(dir.file(&format!("trajectory_{p:04}.csv"))?)?;
    }

    let mut solved = json!({"solved": false});
    if c.solve {
        match NonZeroSumGame::from_two_atom(&spec) {
            Err(Error::Capability(reason)) => solved = json!({"solved": false, "reason": reason}),
            Err(e) => return Err(e.into()),
            Ok(game) => {
                let mild = MildConfig { dt: c.solver_dt, ..MildConfig::default() };
                let (v1, v2) = solve_nonzero_sum(&game, c.resolution, &mild)?;
                dir.csv(
                    "value.csv",
                    &["x0", "x1", "S_I", "S_II"].map(String::from),
                    v1.grid().nodes().iter().enumerate().map(|(j, x)| vec![x[0], x[1], v1.initial().values()[j], v2.initial().values()[j]]),
                )?;
                solved = json!({
                    "solved": true,
                    "grid": manifold_json(v1.grid()),
                    "iterations": v1.iterations(),
                    "value_initial": [initial_stats(&v1), initial_stats(&v2)],
                });
            }
        }
    }
    dir.summary(json!({
        "atom_dim": d,
        "drift_samples": c.samples,
        "max_drift_norm": num(max_drift),
        "paths": c.paths,
        "truncated_paths": truncated,
        "hjb": solved,
    }))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapshots_cover_both_ends() {
        assert_eq!(snapshot_indices(11, 10), (0..=10).collect::<Vec<_>>());
        assert_eq!(snapshot_indices(501, 4), vec![0, 125, 250, 375, 500]);
        assert_eq!(snapshot_indices(3, 10), vec![0, 1, 2]);
    }

    #[test]
    fn resolution_pins_defaults_and_drops_unused_sections() {
        let file = Config { circle: Some(CircleConfig::default()), ..Config::default() };
        let r = resolve(Command::PolicyEval, file, Some(9)).unwrap();
        assert_eq!(r.seed, Some(9));
        assert!(r.circle.is_none());
        assert_eq!(r.solver.as_ref().unwrap().dt, Some(DEFAULT_MILD_DT));
        assert_eq!(r.mc.as_ref().unwrap().initial, vec![vec![[1.0, 0.0]]]);
        // Resolving the resolved file is a fixed point.
        assert_eq!(resolve(Command::PolicyEval, r.clone(), None).unwrap(), r);
    }

    #[test]
    fn qutrit_scheme_requires_a_game() {
        let file = Config { scheme: Some(SchemeConfig::GellMann { dim: 3 }), ..Config::default() };
        assert!(resolve(Command::SolveHjb, file.clone(), None).is_err());
        assert!(resolve(Command::Simulate, file, None).is_ok());
    }

    #[test]
    fn numerical_errors_are_separated() {
        assert!(matches!(RunError::from(Error::Cfl { dt: 1.0, limit: 0.5 }), RunError::Numerical { .. }));
        assert!(matches!(RunError::from(Error::Divergence { residuals: vec![1.0] }), RunError::Numerical { .. }));
        assert!(matches!(RunError::from(Error::Capability("x".into())), RunError::Config(_)));
        assert!(matches!(RunError::from(Error::DimensionMismatch { expected: 1, got: 2 }), RunError::Config(_)));
    }

    #[test]
    fn pair_labels() {
        assert_eq!((1..4).map(|k| pair_label(k, 2)).collect::<Vec<_>>(), ["01", "10", "11"]);
    }
}
