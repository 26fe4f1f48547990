//! `dqg`: batch runner for filtering simulations, scheme analysis and game solvers.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 numerical failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Command, RunError};
use config::{Config, SchemeConfig};
use output::RunDir;

#[derive(Parser)]
#[command(name = "dqg", version, about = "Quantum filtering diffusions and the drift-control games they induce", after_help = FILES)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML experiment file; every section is optional and unknown keys are rejected.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed; overrides `seed` in the file (default 0).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default out/<subcommand>).
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads for data-parallel loops; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
}

const FILES: &str = "Every run writes config.resolved.toml (the configuration actually used) and \
summary.json (schema_version, command, spec_hash = sha256 of the resolved file, seed, results). \
A numerical failure also writes failure.json.\n\nExit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 numerical failure.";

#[derive(Subcommand)]
enum Sub {
    /// Simulate filtered paths under constant controls ([scheme], [hamiltonian], [simulate]).
    #[command(after_help = concat!(
        "Output: trajectory_NNNN.csv, one per path, columns t, the state (re_w<k>,im_w<k> | ",
        "phi<k> | re_chi<k>,im_chi<k> by representation), dY_<channel> per channel, u, v. ",
        "Increment and control cells belong to the step starting at that row and are empty on the last row."
    ))]
    Simulate(Common),
    /// Check drift and quadratic variation of a scheme against its closed form, and
    /// isothermality for three-channel qubit schemes ([scheme], [analyze]).
    #[command(after_help = concat!(
        "SCHEME: pauli, gell-mann-<d>, torus-<n>, euclidean-<n>; overrides [scheme].\n",
        "Output: samples.csv, columns index, re_w<k>,im_w<k>, drift_re_w<k>,drift_im_w<k> ",
        "(output-noise drift with H = 0), qv_trace."
    ))]
    AnalyzeScheme {
        scheme: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Solve the backward HJB-Isaacs equation of a game ([scheme], [hamiltonian], [game], [solver]).
    #[command(after_help = concat!(
        "A game with running_ii or terminal_ii is solved as a non-zero-sum pair.\n",
        "Output: value.csv, columns t, x0, x1, S (or S_I, S_II) at snapshots + 1 times; ",
        "x0, x1 are the grid coordinates (circle: phi, 0; torus: phi1, phi2; sphere: colatitude, longitude)."
    ))]
    SolveHjb(Common),
    /// Ergodic constant and stationary profile of the circle problem
    /// kappa S'' + alpha |S'| + cos = lambda, plus the discounted closed form
    /// S''/2 + alpha |S'| + cos = delta S when delta is set ([circle]).
    #[command(after_help = concat!(
        "Output: stationary.csv, columns phi, S (mean-zero); discounted.csv, columns phi, S, dS, residual."
    ))]
    ExactCircle(Common),
    /// Monte Carlo payoff of the bang-bang or a constant policy against the PDE value
    /// ([scheme], [hamiltonian], [game], [solver], [mc]).
    #[command(after_help = concat!(
        "Output: mc.csv, columns index, re_w<k>,im_w<k>, value, mc_mean, mc_stderr, paths, chart_exits; ",
        "value.csv, columns x0, x1, S at t = 0."
    ))]
    PolicyEval(Common),
    /// Two-player game on two coupled atoms: drift samples, filtered paths, and the coupled
    /// HJB system on the product-state torus when it applies ([two_atom]).
    #[command(after_help = concat!(
        "Output: drift.csv, columns index, re_w<jk>,im_w<jk>, re_b<jk>,im_b<jk> over the flattened ",
        "tensor coordinates; trajectory_NNNN.csv as for simulate; value.csv, columns x0, x1, S_I, S_II ",
        "at t = 0 (angles of w10, w01) when solved."
    ))]
    TwoAtom(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, common, scheme) = match cli.command {
        Sub::Simulate(c) => (Command::Simulate, c, None),
        Sub::AnalyzeScheme { scheme, common } => (Command::AnalyzeScheme, common, scheme),
        Sub::SolveHjb(c) => (Command::SolveHjb, c, None),
        Sub::ExactCircle(c) => (Command::ExactCircle, c, None),
        Sub::PolicyEval(c) => (Command::PolicyEval, c, None),
        Sub::TwoAtom(c) => (Command::TwoAtom, c, None),
    };
    match execute(command, &common, scheme.as_deref()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Config(msg)) => {
            eprintln!("configuration error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::Numerical { message, .. }) => {
            eprintln!("numerical failure: {message}");
            ExitCode::from(3)
        }
        Err(RunError::Io(e)) => {
            eprintln!("i/o error: {e}");
            ExitCode::from(1)
        }
    }
}

fn execute(command: Command, common: &Common, scheme: Option<&str>) -> Result<(), RunError> {
    let mut file = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(name) = scheme {
        file.scheme = Some(SchemeConfig::from_name(name)?);
    }
    let threads = common.threads.or(file.threads);
    if let Some(n) = threads {
        if n == 0 {
            return Err(RunError::Config("threads must be positive".into()));
        }
        dqg::exec::set_threads(n).map_err(RunError::Config)?;
    }
    let resolved = commands::resolve(command, file, common.seed)?;
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from("out").join(command.name()));
    let dir = RunDir::create(&out, command.name(), &resolved.to_toml(), resolved.seed.unwrap_or(0))?;
    let result = commands::run(command, &resolved, &dir);
    if let Err(RunError::Numerical { message, report }) = &result {
        let mut body = report.clone();
        body["message"] = message.clone().into();
        dir.json("failure.json", body)?;
    }
    result
}
