//! Experiment configuration: a TOML file whose sections are all optional and fall back to
//! the defaults below. Unknown keys are rejected.

use std::path::Path;

use dqg::filtering::{ControlledHamiltonian, DetectionScheme, NoiseKind, Representation};
use dqg::games::{CostPair, GameSpec, TwoAtomSpec};
use dqg::quantum::{sigma_x, sigma_y, sigma_z, ComplexMatrix, ProjectiveState};
use dqg::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub scheme: Option<SchemeConfig>,
    pub hamiltonian: Option<HamiltonianConfig>,
    pub game: Option<GameConfig>,
    pub solver: Option<SolverConfig>,
    pub mc: Option<McSection>,
    pub simulate: Option<SimulateConfig>,
    pub analyze: Option<AnalyzeConfig>,
    pub circle: Option<CircleConfig>,
    pub two_atom: Option<TwoAtomConfig>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeConfig {
    Pauli {},
    GellMann { dim: usize },
    Torus { rates: Vec<f64> },
    Euclidean { n: usize },
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig::Torus { rates: vec![1.0] }
    }
}

impl SchemeConfig {
    /// Short names accepted on the command line: `pauli`, `gell-mann-<d>`, `torus-<n>`,
    /// `euclidean-<n>`.
    pub fn from_name(name: &str) -> Result<Self, ConfigError> {
        let tail = |prefix: &str| -> Option<Result<usize, ConfigError>> {
            name.strip_prefix(prefix)
                .map(|s| s.parse().map_err(|_| ConfigError(format!("bad scheme size in '{name}'"))))
        };
        if name == "pauli" {
            Ok(SchemeConfig::Pauli {})
        } else if let Some(d) = tail("gell-mann-") {
            Ok(SchemeConfig::GellMann { dim: d? })
        } else if let Some(n) = tail("torus-") {
            Ok(SchemeConfig::Torus { rates: vec![1.0; n?] })
        } else if let Some(n) = tail("euclidean-") {
            Ok(SchemeConfig::Euclidean { n: n? })
        } else {
            bad(format!("unknown scheme '{name}' (pauli, gell-mann-<d>, torus-<n>, euclidean-<n>)"))
        }
    }

    pub fn build(&self) -> Result<DetectionScheme, ConfigError> {
        Ok(match self {
            SchemeConfig::Pauli {} => DetectionScheme::pauli(),
            SchemeConfig::GellMann { dim } => DetectionScheme::gell_mann(*dim).map_err(core_err)?,
            SchemeConfig::Torus { rates } => DetectionScheme::torus_diagonal(rates).map_err(core_err)?,
            SchemeConfig::Euclidean { n } => DetectionScheme::euclidean(*n).map_err(core_err)?,
        })
    }
}

fn core_err(e: dqg::Error) -> ConfigError {
    ConfigError(e.to_string())
}

/// A matrix given by name (`zero`, `identity`, `sigma_x`, `sigma_y`, `sigma_z`) or by
/// entries: `diag = [..]` for a real diagonal, or row-major `re`/`im` nested arrays.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(untagged)]
pub enum MatrixSpec {
    Named(String),
    Entries(MatrixEntries),
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixEntries {
    pub diag: Option<Vec<f64>>,
    pub re: Option<Vec<Vec<f64>>>,
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixSpec {
    pub fn named(name: &str) -> Self {
        MatrixSpec::Named(name.into())
    }

    pub fn diag(d: &[f64]) -> Self {
        MatrixSpec::Entries(MatrixEntries { diag: Some(d.to_vec()), ..Default::default() })
    }

    pub fn build(&self, dim: usize, what: &str) -> Result<ComplexMatrix, ConfigError> {
        let m = match self {
            MatrixSpec::Named(name) => match name.as_str() {
                "zero" => ComplexMatrix::zeros(dim),
                "identity" => ComplexMatrix::identity(dim),
                "sigma_x" | "sigma_y" | "sigma_z" if dim != 2 => {
                    return bad(format!("{what}: '{name}' needs dimension 2, the system has {dim}"))
                }
                "sigma_x" => sigma_x(),
                "sigma_y" => sigma_y(),
                "sigma_z" => sigma_z(),
                _ => return bad(format!("{what}: unknown matrix name '{name}'")),
            },
            MatrixSpec::Entries(e) => match (&e.diag, &e.re, &e.im) {
                (Some(d), None, None) => {
                    if d.len() != dim {
                        return bad(format!("{what}: diag has {} entries, expected {dim}", d.len()));
                    }
                    ComplexMatrix::real_diagonal(d).map_err(core_err)?
                }
                (None, re, im) if re.is_some() || im.is_some() => {
                    let part = |rows: &Option<Vec<Vec<f64>>>, name: &str| -> Result<Vec<f64>, ConfigError> {
                        match rows {
                            None => Ok(vec![0.0; dim * dim]),
                            Some(rows) => {
                                if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                                    return bad(format!("{what}: '{name}' must be {dim} x {dim}"));
                                }
                                Ok(rows.concat())
                            }
                        }
                    };
                    let (re, im) = (part(re, "re")?, part(im, "im")?);
                    let entries = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
                    ComplexMatrix::new(dim, entries).map_err(core_err)?
                }
                _ => return bad(format!("{what}: give either 'diag' or 're'/'im'")),
            },
        };
        if !m.is_hermitian() {
            return bad(format!("{what} must be Hermitian"));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianConfig {
    pub h0: MatrixSpec,
    pub h1: MatrixSpec,
    pub h2: MatrixSpec,
}

impl Default for HamiltonianConfig {
    fn default() -> Self {
        Self { h0: MatrixSpec::named("zero"), h1: MatrixSpec::diag(&[1.0, 0.0]), h2: MatrixSpec::diag(&[0.0, 1.0]) }
    }
}

impl HamiltonianConfig {
    pub fn build(&self, dim: usize) -> Result<ControlledHamiltonian, ConfigError> {
        ControlledHamiltonian::new(self.h0.build(dim, "h0")?, self.h1.build(dim, "h1")?, self.h2.build(dim, "h2")?)
            .map_err(core_err)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GameConfig {
    pub u_max: f64,
    pub v_max: f64,
    pub horizon: f64,
    pub running: MatrixSpec,
    pub terminal: MatrixSpec,
    /// Player II's own costs; when present the game is solved as a non-zero-sum pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub running_ii: Option<MatrixSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terminal_ii: Option<MatrixSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub moduli: Option<Vec<f64>>,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            u_max: 1.5,
            v_max: 0.5,
            horizon: 5.0,
            running: MatrixSpec::named("sigma_x"),
            terminal: MatrixSpec::named("zero"),
            running_ii: None,
            terminal_ii: None,
            moduli: None,
        }
    }
}

impl GameConfig {
    pub fn build(&self, scheme: DetectionScheme, ham: ControlledHamiltonian) -> Result<GameSpec, ConfigError> {
        let dim = ham.dim();
        let costs = CostPair::new(self.running.build(dim, "running")?, self.terminal.build(dim, "terminal")?)
            .map_err(core_err)?;
        let spec = GameSpec::new(scheme, ham, self.u_max, self.v_max, costs, self.horizon).map_err(core_err)?;
        match &self.moduli {
            Some(m) => spec.with_moduli(m.clone()).map_err(core_err),
            None => Ok(spec),
        }
    }

    pub fn costs_ii(&self, dim: usize) -> Result<Option<CostPair>, ConfigError> {
        if self.running_ii.is_none() && self.terminal_ii.is_none() {
            return Ok(None);
        }
        let zero = MatrixSpec::named("zero");
        let j = self.running_ii.as_ref().unwrap_or(&zero).build(dim, "running_ii")?;
        let f = self.terminal_ii.as_ref().unwrap_or(&zero).build(dim, "terminal_ii")?;
        CostPair::new(j, f).map(Some).map_err(core_err)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Mild,
    Fd,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub method: Method,
    /// Grid size: nodes per circle/torus direction, or `lmax` on the sphere.
    pub resolution: usize,
    /// Time step; for `fd` an omitted step picks half the stability limit.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub tolerance: f64,
    pub max_iterations: usize,
    pub window: f64,
    pub discount: f64,
    /// Number of stored time intervals written to `value.csv`.
    pub snapshots: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: Method::Mild,
            resolution: 64,
            dt: None,
            tolerance: 1e-10,
            max_iterations: 200,
            window: 1.0,
            discount: 0.0,
            snapshots: 10,
        }
    }
}

pub const DEFAULT_MILD_DT: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyChoice {
    BangBang,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RepresentationChoice {
    #[default]
    Auto,
    Projective,
    Chi,
    Angles,
    PauliFast,
    Euclidean,
}

impl From<RepresentationChoice> for Representation {
    fn from(r: RepresentationChoice) -> Self {
        match r {
            RepresentationChoice::Auto => Representation::Auto,
            RepresentationChoice::Projective => Representation::Projective,
            RepresentationChoice::Chi => Representation::Chi,
            RepresentationChoice::Angles => Representation::Angles,
            RepresentationChoice::PauliFast => Representation::PauliFast,
            RepresentationChoice::Euclidean => Representation::Euclidean,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChoice {
    #[default]
    Innovation,
    Output,
}

impl From<NoiseChoice> for NoiseKind {
    fn from(n: NoiseChoice) -> Self {
        match n {
            NoiseChoice::Innovation => NoiseKind::Innovation,
            NoiseChoice::Output => NoiseKind::Output,
        }
    }
}

/// Chart point as `[[re, im], ...]`, one pair per coordinate `w_1 .. w_n`.
pub type ChartPoint = Vec<[f64; 2]>;

pub fn chart_state(point: &ChartPoint, n: usize, what: &str) -> Result<ProjectiveState, ConfigError> {
    if point.len() != n {
        return bad(format!("{what}: expected {n} chart coordinates, got {}", point.len()));
    }
    ProjectiveState::new(point.iter().map(|&[a, b]| Complex64::new(a, b)).collect()).map_err(core_err)
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub dt: f64,
    pub paths: usize,
    /// Initial chart points; empty means one point at the fixed moduli (torus) or the origin.
    pub initial: Vec<ChartPoint>,
    pub policy: PolicyChoice,
    /// Controls of the `constant` policy.
    pub u: f64,
    pub v: f64,
    pub representation: RepresentationChoice,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            dt: 1e-2,
            paths: 2000,
            initial: Vec::new(),
            policy: PolicyChoice::BangBang,
            u: 0.0,
            v: 0.0,
            representation: RepresentationChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub dt: f64,
    pub horizon: f64,
    pub paths: usize,
    /// Initial chart point; empty means the origin.
    pub initial: ChartPoint,
    pub u: f64,
    pub v: f64,
    pub noise: NoiseChoice,
    pub representation: RepresentationChoice,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            horizon: 1.0,
            paths: 1,
            initial: Vec::new(),
            u: 0.0,
            v: 0.0,
            noise: NoiseChoice::Innovation,
            representation: RepresentationChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AnalyzeConfig {
    pub points: usize,
    pub radius: f64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self { points: 200, radius: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CircleConfig {
    pub alpha: f64,
    /// Diffusion coefficient of the stationary problem `kappa S'' + alpha |S'| + cos = lambda`.
    pub kappa: f64,
    /// Discount rate of the closed-form discounted solution; omitted skips it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub n: usize,
}

impl Default for CircleConfig {
    fn default() -> Self {
        Self { alpha: 1.0, kappa: 1.0, delta: None, n: 256 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TwoAtomConfig {
    pub h_i: MatrixSpec,
    pub h_ii: MatrixSpec,
    pub interaction: MatrixSpec,
    pub u_max: f64,
    pub v_max: f64,
    pub running_i: MatrixSpec,
    pub terminal_i: MatrixSpec,
    pub running_ii: MatrixSpec,
    pub terminal_ii: MatrixSpec,
    pub rate: f64,
    pub moduli: [f64; 2],
    pub horizon: f64,
    /// Constant controls of the drift samples and the simulated paths.
    pub u: f64,
    pub v: f64,
    /// Drift sample points, drawn uniformly from the chart ball of this radius.
    pub samples: usize,
    pub radius: f64,
    pub dt: f64,
    pub paths: usize,
    /// Solve the coupled HJB system on the product-state torus when it applies.
    pub solve: bool,
    pub resolution: usize,
    pub solver_dt: f64,
}

fn real_matrix<const N: usize>(rows: &[[f64; N]; N]) -> MatrixSpec {
    MatrixSpec::Entries(MatrixEntries { re: Some(rows.iter().map(|r| r.to_vec()).collect()), ..Default::default() })
}

/// Defaults: two qubits with `sigma_z` controls, a non-entangling diagonal interaction, and
/// running costs `sigma_x (x) 1` for player I and `1 (x) sigma_x` for player II.
impl Default for TwoAtomConfig {
    fn default() -> Self {
        let z = MatrixSpec::diag(&[1.0, -1.0]);
        Self {
            h_i: z.clone(),
            h_ii: z,
            interaction: MatrixSpec::diag(&[0.0, 0.5, 0.5, 1.0]),
            u_max: 1.0,
            v_max: 1.0,
            running_i: real_matrix(&[[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0], [1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]),
            terminal_i: MatrixSpec::named("zero"),
            running_ii: real_matrix(&[[0.0, 1.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]]),
            terminal_ii: MatrixSpec::named("zero"),
            rate: 1.0,
            moduli: [1.0, 1.0],
            horizon: 1.0,
            u: 0.5,
            v: -0.5,
            samples: 16,
            radius: 2.0,
            dt: 1e-3,
            paths: 1,
            solve: true,
            resolution: 32,
            solver_dt: 1e-2,
        }
    }
}

impl TwoAtomConfig {
    pub fn build(&self, atom_dim: usize) -> Result<TwoAtomSpec, ConfigError> {
        let d2 = atom_dim * atom_dim;
        let pair = |j: &MatrixSpec, f: &MatrixSpec, who: &str| -> Result<CostPair, ConfigError> {
            CostPair::new(j.build(d2, &format!("running_{who}"))?, f.build(d2, &format!("terminal_{who}"))?)
                .map_err(core_err)
        };
        let mut spec = TwoAtomSpec::new(
            self.h_i.build(atom_dim, "h_i")?,
            self.h_ii.build(atom_dim, "h_ii")?,
            self.interaction.build(d2, "interaction")?,
            self.u_max,
            self.v_max,
            pair(&self.running_i, &self.terminal_i, "i")?,
            pair(&self.running_ii, &self.terminal_ii, "ii")?,
            self.horizon,
        )
        .map_err(core_err)?;
        if !(self.rate.is_finite() && self.rate > 0.0) || self.moduli.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return bad("two_atom: rate and moduli must be positive");
        }
        spec.rate = self.rate;
        spec.moduli = self.moduli;
        Ok(spec)
    }

    /// Per-atom dimension, read from `h_i`.
    pub fn atom_dim(&self) -> Result<usize, ConfigError> {
        match &self.h_i {
            MatrixSpec::Named(n) if n.starts_with("sigma_") => Ok(2),
            MatrixSpec::Entries(MatrixEntries { diag: Some(d), .. }) => Ok(d.len()),
            MatrixSpec::Entries(MatrixEntries { re: Some(r), .. }) | MatrixSpec::Entries(MatrixEntries { im: Some(r), .. }) => {
                Ok(r.len())
            }
            _ => bad("two_atom: h_i must fix the atom dimension (sigma_*, diag, or re/im)"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_valid() {
        assert_eq!(Config::parse("").unwrap(), Config::default());
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let err = Config::parse("seed = 3\n\n[solver]\nmethod = \"mild\"\nresolutoin = 32\n").unwrap_err();
        assert!(err.0.contains("line 5"), "{err}");
        assert!(err.0.contains("resolutoin"), "{err}");
    }

    #[test]
    fn unknown_scheme_field_is_rejected() {
        assert!(Config::parse("[scheme]\nkind = \"pauli\"\ndim = 2\n").is_err());
        assert!(Config::parse("[scheme]\nkind = \"gell-mann\"\ndim = 3\n").is_ok());
    }

    #[test]
    fn resolved_config_round_trips() {
        let cfg = Config {
            seed: Some(7),
            scheme: Some(SchemeConfig::Pauli {}),
            hamiltonian: Some(HamiltonianConfig::default()),
            game: Some(GameConfig { running_ii: Some(MatrixSpec::named("sigma_z")), ..Default::default() }),
            solver: Some(SolverConfig { dt: Some(0.01), ..Default::default() }),
            mc: Some(McSection { initial: vec![vec![[1.0, 0.0]]], ..Default::default() }),
            circle: Some(CircleConfig { delta: Some(0.5), ..Default::default() }),
            two_atom: Some(TwoAtomConfig::default()),
            ..Default::default()
        };
        assert_eq!(Config::parse(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn matrices_build_from_names_and_entries() {
        assert_eq!(MatrixSpec::named("sigma_x").build(2, "m").unwrap(), sigma_x());
        let y = MatrixSpec::Entries(MatrixEntries { im: Some(vec![vec![0.0, -1.0], vec![1.0, 0.0]]), ..Default::default() });
        assert_eq!(y.build(2, "m").unwrap(), sigma_y());
        assert!(MatrixSpec::named("sigma_x").build(3, "m").is_err());
        let not_hermitian = MatrixSpec::Entries(MatrixEntries { re: Some(vec![vec![0.0, 1.0], vec![0.0, 0.0]]), ..Default::default() });
        assert!(not_hermitian.build(2, "m").is_err());
        assert!(MatrixSpec::diag(&[1.0]).build(2, "m").is_err());
    }

    #[test]
    fn scheme_names() {
        assert_eq!(SchemeConfig::from_name("gell-mann-3").unwrap(), SchemeConfig::GellMann { dim: 3 });
        assert_eq!(SchemeConfig::from_name("torus-2").unwrap(), SchemeConfig::Torus { rates: vec![1.0, 1.0] });
        assert!(SchemeConfig::from_name("klein").is_err());
    }
}
