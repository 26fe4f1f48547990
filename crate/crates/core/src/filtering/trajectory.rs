use std::io::{self, Write};

use num_complex::Complex64;

use super::coefficients::channel_means_of;
use super::step::pauli_increment;
use super::{
    step_euclidean, step_linear_chi, step_projective_guarded, step_torus_angles, wrap_angle,
    ControlledHamiltonian, DetectionScheme, NoiseKind, SchemeKind,
};
use crate::error::{check_dim, Error, Result};
use crate::quantum::{ProjectiveState, StateVector};
use crate::rng::{fill_increments, path_rng, PathRng};

/// State representation used when integrating a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Representation {
    /// Pauli fast path for the Pauli scheme, angles for torus schemes, the dedicated
    /// stepper for the Euclidean scheme, the general projective stepper otherwise.
    #[default]
    Auto,
    Projective,
    /// Unnormalized `chi`, renormalized after every step. Never leaves a chart.
    Chi,
    Angles,
    PauliFast,
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub dt: f64,
    pub horizon: f64,
    pub seed: u64,
    /// Random stream within `seed`; ensembles use the path index.
    pub stream: u64,
    pub noise_kind: NoiseKind,
    /// Multiplies every drawn increment; 0 gives the noiseless ODE.
    pub noise_scale: f64,
    pub chart_guard: f64,
    pub representation: Representation,
}

impl TrajectoryConfig {
    pub fn new(dt: f64, horizon: f64, seed: u64) -> Result<Self> {
        let cfg = Self {
            dt,
            horizon,
            seed,
            stream: 0,
            noise_kind: NoiseKind::Innovation,
            noise_scale: 1.0,
            chart_guard: ProjectiveState::DEFAULT_GUARD,
            representation: Representation::Auto,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::domain("dt must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::domain("horizon must be positive"));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(Error::domain("noise scale must be non-negative"));
        }
        if !(self.chart_guard > 0.0) {
            return Err(Error::domain("chart guard must be positive"));
        }
        Ok(())
    }

    /// Number of steps of the uniform grid covering `[0, horizon]`.
    pub fn steps(&self) -> usize {
        ((self.horizon / self.dt).round() as usize).max(1)
    }
}

/// View of the current state handed to a feedback policy.
#[derive(Debug, Clone, Copy)]
pub enum PolicyState<'a> {
    Chart(&'a ProjectiveState),
    Angles { phi: &'a [f64], moduli: &'a [f64] },
    Chi(&'a StateVector),
}

impl PolicyState<'_> {
    /// Chart coordinates of the state, if it lies in the chart.
    pub fn to_chart(&self) -> Result<ProjectiveState> {
        match self {
            PolicyState::Chart(w) => Ok((*w).clone()),
            PolicyState::Angles { phi, moduli } => ProjectiveState::new(
                phi.iter()
                    .zip(moduli.iter())
                    .map(|(&p, &m)| Complex64::from_polar(m, p))
                    .collect(),
            ),
            PolicyState::Chi(chi) => chi.to_projective(),
        }
    }
}

/// Markovian feedback `(t, state) -> (u, v)`.
pub trait FeedbackPolicy: Sync {
    /// Declared bounds `(U, V)`; every returned control must satisfy `|u| <= U`, `|v| <= V`.
    fn bounds(&self) -> (f64, f64);
    fn control(&self, t: f64, state: PolicyState<'_>) -> (f64, f64);
}

/// Constant controls.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConstantControl {
    pub u: f64,
    pub v: f64,
}

impl FeedbackPolicy for ConstantControl {
    fn bounds(&self) -> (f64, f64) {
        (self.u.abs(), self.v.abs())
    }

    fn control(&self, _t: f64, _state: PolicyState<'_>) -> (f64, f64) {
        (self.u, self.v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryStates {
    Projective(Vec<ProjectiveState>),
    /// Angles per time; the moduli `|w_k|` are fixed by the initial state.
    Angles { moduli: Vec<f64>, phi: Vec<Vec<f64>> },
    Chi(Vec<StateVector>),
}

impl TrajectoryStates {
    pub fn len(&self) -> usize {
        match self {
            TrajectoryStates::Projective(v) => v.len(),
            TrajectoryStates::Angles { phi, .. } => phi.len(),
            TrajectoryStates::Chi(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Chart exit during a simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub time: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: TrajectoryStates,
    /// Output increments `dY^j` of each step (reconstructed under the innovation measure).
    pub increments: Vec<Vec<f64>>,
    pub controls: Vec<(f64, f64)>,
    pub noise_kind: NoiseKind,
    pub labels: Vec<String>,
    pub truncation: Option<Truncation>,
}

impl Trajectory {
    /// CSV with columns `t`, the state (`re_w<k>, im_w<k>`, `phi<k>` or `re_chi<k>, im_chi<k>`),
    /// `dY_<label>` and `u, v`. Increment and control columns of a row belong to the step
    /// starting at that row's time and are empty on the final row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut header = vec!["t".to_string()];
        match &self.states {
            TrajectoryStates::Projective(v) => {
                for k in 1..=v.first().map_or(0, |w| w.n()) {
                    header.push(format!("re_w{k}"));
                    header.push(format!("im_w{k}"));
                }
            }
            TrajectoryStates::Angles { moduli, .. } => {
                header.extend((1..=moduli.len()).map(|k| format!("phi{k}")));
            }
            TrajectoryStates::Chi(v) => {
                for k in 0..v.first().map_or(0, |c| c.dim()) {
                    header.push(format!("re_chi{k}"));
                    header.push(format!("im_chi{k}"));
                }
            }
        }
        header.extend(self.labels.iter().map(|l| format!("dY_{l}")));
        header.push("u".into());
        header.push("v".into());
        writeln!(out, "{}", header.join(","))?;

        for (i, t) in self.times.iter().enumerate() {
            let mut row = vec![t.to_string()];
            match &self.states {
                TrajectoryStates::Projective(v) => {
                    for z in v[i].coords() {
                        row.push(z.re.to_string());
                        row.push(z.im.to_string());
                    }
                }
                TrajectoryStates::Angles { phi, .. } => {
                    row.extend(phi[i].iter().map(|p| p.to_string()));
                }
                TrajectoryStates::Chi(v) => {
                    for z in v[i].components() {
                        row.push(z.re.to_string());
                        row.push(z.im.to_string());
                    }
                }
            }
            match (self.increments.get(i), self.controls.get(i)) {
                (Some(dy), Some((u, v))) => {
                    row.extend(dy.iter().map(|x| x.to_string()));
                    row.push(u.to_string());
                    row.push(v.to_string());
                }
                _ => row.extend(std::iter::repeat_n(String::new(), self.labels.len() + 2)),
            }
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Mutable state of one path.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum PathState {
    Chart(ProjectiveState),
    Angles { phi: Vec<f64>, moduli: Vec<f64> },
    Chi(StateVector),
}

impl PathState {
    pub(crate) fn view(&self) -> PolicyState<'_> {
        match self {
            PathState::Chart(w) => PolicyState::Chart(w),
            PathState::Angles { phi, moduli } => PolicyState::Angles { phi, moduli },
            PathState::Chi(c) => PolicyState::Chi(c),
        }
    }

    /// Lifted vector `W` or `chi`, proportional to the physical state.
    pub(crate) fn vector(&self) -> Vec<Complex64> {
        match self {
            PathState::Chart(w) => w.lifted(),
            PathState::Angles { .. } => self.view().to_chart().map(|w| w.lifted()).unwrap_or_default(),
            PathState::Chi(c) => c.components().to_vec(),
        }
    }
}

/// Resolved integrator shared by [`simulate_trajectory`] and the Monte Carlo evaluators.
pub(crate) struct Engine<'a> {
    scheme: &'a DetectionScheme,
    hamiltonian: &'a ControlledHamiltonian,
    config: &'a TrajectoryConfig,
    repr: Representation,
    rates: Vec<f64>,
}

impl<'a> Engine<'a> {
    pub(crate) fn new(
        scheme: &'a DetectionScheme,
        hamiltonian: &'a ControlledHamiltonian,
        config: &'a TrajectoryConfig,
    ) -> Result<Self> {
        config.validate()?;
        if scheme.channels() > 0 {
            check_dim(scheme.dim(), hamiltonian.dim())?;
        }
        let repr = match config.representation {
            Representation::Auto => match scheme.kind() {
                SchemeKind::PauliSphere => Representation::PauliFast,
                SchemeKind::TorusDiagonal => Representation::Angles,
                SchemeKind::EuclideanColumn => Representation::Euclidean,
                _ => Representation::Projective,
            },
            r => r,
        };
        let need = |kind: SchemeKind| -> Result<()> {
            if scheme.kind() == kind {
                Ok(())
            } else {
                Err(Error::SchemeMismatch(format!(
                    "{repr:?} representation needs a {kind:?} scheme, got {:?}",
                    scheme.kind()
                )))
            }
        };
        match repr {
            Representation::PauliFast => need(SchemeKind::PauliSphere)?,
            Representation::Euclidean => need(SchemeKind::EuclideanColumn)?,
            Representation::Angles => {
                need(SchemeKind::TorusDiagonal)?;
                hamiltonian.require_diagonal()?;
            }
            _ => {}
        }
        Ok(Self {
            scheme,
            hamiltonian,
            config,
            repr,
            rates: scheme.torus_rates().unwrap_or_default(),
        })
    }

    pub(crate) fn representation(&self) -> Representation {
        self.repr
    }

    pub(crate) fn initial(&self, w0: &ProjectiveState) -> Result<PathState> {
        check_dim(self.hamiltonian.dim(), w0.n() + 1)?;
        w0.check_guard(self.config.chart_guard)?;
        Ok(match self.repr {
            Representation::Angles => PathState::Angles {
                phi: w0.coords().iter().map(|z| wrap_angle(z.arg())).collect(),
                moduli: w0.coords().iter().map(|z| z.norm()).collect(),
            },
            Representation::Chi => PathState::Chi(w0.from_projective().normalized()),
            _ => PathState::Chart(w0.clone()),
        })
    }

    pub(crate) fn rng(&self, stream: u64) -> PathRng {
        path_rng(self.config.seed, stream)
    }

    /// Draws the noise of one step, applies the policy and advances `state` in place.
    /// Returns the controls; `dy` receives the output increments.
    pub(crate) fn advance(
        &self,
        state: &mut PathState,
        t: f64,
        policy: &dyn FeedbackPolicy,
        rng: &mut PathRng,
        dy: &mut [f64],
    ) -> Result<(f64, f64)> {
        let dt = self.config.dt;
        let (u, v) = policy.control(t, state.view());
        let (ub, vb) = policy.bounds();
        let slack = 1e-12;
        if !(u.abs() <= ub * (1.0 + slack) + slack && v.abs() <= vb * (1.0 + slack) + slack) {
            return Err(Error::domain(format!(
                "policy returned ({u}, {v}) outside its bounds ({ub}, {vb})"
            )));
        }
        fill_increments(rng, dt, dy);
        if self.config.noise_scale != 1.0 {
            for x in dy.iter_mut() {
                *x *= self.config.noise_scale;
            }
        }
        if self.config.noise_kind == NoiseKind::Innovation && self.scheme.kind() != SchemeKind::TorusDiagonal {
            let means = channel_means_of(self.scheme, &state.vector());
            for (x, m) in dy.iter_mut().zip(means) {
                *x += m * dt;
            }
        }
        let h = self.hamiltonian.at(u, v);
        let guard = self.config.chart_guard;
        match state {
            PathState::Chart(w) => {
                let next = match self.repr {
                    Representation::PauliFast => {
                        let z = w.coords()[0];
                        ProjectiveState::new(vec![z + pauli_increment(z, &h, dy, dt)])?
                    }
                    Representation::Euclidean => step_euclidean(w, &h, dy, dt)?,
                    _ => step_projective_guarded(w, &h, self.scheme, dy, dt, NoiseKind::Output, guard)?,
                };
                next.check_guard(guard)?;
                *w = next;
            }
            PathState::Angles { phi, .. } => {
                *phi = step_torus_angles(phi, &h, &self.rates, dy, dt)?;
            }
            PathState::Chi(chi) => {
                *chi = step_linear_chi(chi, &h, self.scheme, dy, dt)?.normalized();
            }
        }
        Ok((u, v))
    }
}

/// Simulates one controlled filtering path from `initial` on the uniform grid of `config`.
///
/// A chart exit ends the path early and is recorded in [`Trajectory::truncation`].
/// The result is a deterministic function of the arguments.
pub fn simulate_trajectory(
    scheme: &DetectionScheme,
    hamiltonian: &ControlledHamiltonian,
    policy: &dyn FeedbackPolicy,
    initial: &ProjectiveState,
    config: &TrajectoryConfig,
) -> Result<Trajectory> {
    let engine = Engine::new(scheme, hamiltonian, config)?;
    let mut state = engine.initial(initial)?;
    let mut rng = engine.rng(config.stream);
    let steps = config.steps();
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut increments = Vec::with_capacity(steps);
    let mut controls = Vec::with_capacity(steps);
    let mut truncation = None;
    let mut dy = vec![0.0; scheme.channels()];
    times.push(0.0);
    states.push(state.clone());
    for i in 0..steps {
        let t = i as f64 * config.dt;
        match engine.advance(&mut state, t, policy, &mut rng, &mut dy) {
            Ok(uv) => {
                controls.push(uv);
                increments.push(dy.clone());
                times.push((i + 1) as f64 * config.dt);
                states.push(state.clone());
            }
            Err(Error::ChartExit { norm, .. }) => {
                truncation = Some(Truncation { time: t + config.dt, norm });
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let states = match engine.representation() {
        Representation::Angles => {
            let moduli = match &states[0] {
                PathState::Angles { moduli, .. } => moduli.clone(),
                _ => unreachable!(),
            };
            TrajectoryStates::Angles {
                moduli,
                phi: states
                    .into_iter()
                    .map(|s| match s {
                        PathState::Angles { phi, .. } => phi,
                        _ => unreachable!(),
                    })
                    .collect(),
            }
        }
        Representation::Chi => TrajectoryStates::Chi(
            states
                .into_iter()
                .map(|s| match s {
                    PathState::Chi(c) => c,
                    _ => unreachable!(),
                })
                .collect(),
        ),
        _ => TrajectoryStates::Projective(
            states
                .into_iter()
                .map(|s| match s {
                    PathState::Chart(w) => w,
                    _ => unreachable!(),
                })
                .collect(),
        ),
    };
    Ok(Trajectory {
        times,
        states,
        increments,
        controls,
        noise_kind: config.noise_kind,
        labels: scheme.labels().to_vec(),
        truncation,
    })
}
