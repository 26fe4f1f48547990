use num_complex::Complex64;

use crate::error::check_dim;
use crate::filtering::{ControlledHamiltonian, DetectionScheme, SchemeKind};
use crate::quantum::ComplexMatrix;
use crate::{Error, Result};

/// Running cost `J` and terminal cost `F` of one player.
#[derive(Debug, Clone, PartialEq)]
pub struct CostPair {
    pub running: ComplexMatrix,
    pub terminal: ComplexMatrix,
}

impl CostPair {
    pub fn new(running: ComplexMatrix, terminal: ComplexMatrix) -> Result<Self> {
        running.require_hermitian("running cost")?;
        terminal.require_hermitian("terminal cost")?;
        check_dim(running.dim(), terminal.dim())?;
        Ok(Self { running, terminal })
    }

    pub fn zero(dim: usize) -> Self {
        Self { running: ComplexMatrix::zeros(dim), terminal: ComplexMatrix::zeros(dim) }
    }

    pub fn negated(&self) -> Self {
        Self { running: self.running.scale_real(-1.0), terminal: self.terminal.scale_real(-1.0) }
    }

    pub fn dim(&self) -> usize {
        self.running.dim()
    }
}

fn check_bound(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite and non-negative, got {x}")))
    }
}

/// Zero-sum game on one system: player I picks `u in [-U, U]` and maximises
/// `E[int_0^T <J> dt + <F>_T]`, player II picks `v in [-V, V]` and minimises it.
/// The state is driven by `H(u, v) = H0 + u H1 + v H2` under the detection scheme.
#[derive(Debug, Clone)]
pub struct GameSpec {
    pub scheme: DetectionScheme,
    pub hamiltonian: ControlledHamiltonian,
    pub u_max: f64,
    pub v_max: f64,
    pub costs: CostPair,
    pub horizon: f64,
    /// Fixed moduli `|w_k|` of the torus reductions; ignored elsewhere.
    pub moduli: Vec<f64>,
}

impl GameSpec {
    pub fn new(
        scheme: DetectionScheme,
        hamiltonian: ControlledHamiltonian,
        u_max: f64,
        v_max: f64,
        costs: CostPair,
        horizon: f64,
    ) -> Result<Self> {
        check_bound("U", u_max)?;
        check_bound("V", v_max)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("horizon must be positive"));
        }
        if scheme.channels() > 0 {
            check_dim(scheme.dim(), hamiltonian.dim())?;
        }
        check_dim(hamiltonian.dim(), costs.dim())?;
        let moduli = vec![1.0; hamiltonian.dim() - 1];
        Ok(Self { scheme, hamiltonian, u_max, v_max, costs, horizon, moduli })
    }

    pub fn with_moduli(mut self, moduli: Vec<f64>) -> Result<Self> {
        check_dim(self.hamiltonian.dim() - 1, moduli.len())?;
        if moduli.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(Error::domain("moduli must be positive"));
        }
        self.moduli = moduli;
        Ok(self)
    }

    pub fn is_torus(&self) -> bool {
        self.scheme.kind() == SchemeKind::TorusDiagonal
    }
}

/// Two players acting on two coupled systems `C^d (x) C^d`: player I through `u H^I (x) 1`,
/// player II through the second factor, and a fixed interaction `A`.
///
/// Tensor indices `(j, k)` are flattened to `j d + k`.
#[derive(Debug, Clone)]
pub struct TwoAtomSpec {
    pub h_i: ComplexMatrix,
    pub h_ii: ComplexMatrix,
    pub interaction: ComplexMatrix,
    pub u_max: f64,
    pub v_max: f64,
    pub costs_i: CostPair,
    pub costs_ii: CostPair,
    /// Rate of the per-atom diagonal detection used by the torus reduction.
    pub rate: f64,
    /// Moduli of `w_10` and `w_01` in the product-state torus reduction.
    pub moduli: [f64; 2],
    pub horizon: f64,
}

impl TwoAtomSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        h_i: ComplexMatrix,
        h_ii: ComplexMatrix,
        interaction: ComplexMatrix,
        u_max: f64,
        v_max: f64,
        costs_i: CostPair,
        costs_ii: CostPair,
        horizon: f64,
    ) -> Result<Self> {
        h_i.require_hermitian("H^I")?;
        h_ii.require_hermitian("H^II")?;
        interaction.require_hermitian("interaction")?;
        check_dim(h_i.dim(), h_ii.dim())?;
        let d = h_i.dim();
        check_dim(d * d, interaction.dim())?;
        check_dim(d * d, costs_i.dim())?;
        check_dim(d * d, costs_ii.dim())?;
        check_bound("U", u_max)?;
        check_bound("V", v_max)?;
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain("horizon must be positive"));
        }
        Ok(Self { h_i, h_ii, interaction, u_max, v_max, costs_i, costs_ii, rate: 1.0, moduli: [1.0, 1.0], horizon })
    }

    pub fn atom_dim(&self) -> usize {
        self.h_i.dim()
    }

    /// `H(u, v) = A + u H^I (x) 1 + v 1 (x) (H^II)^T` on the tensor space.
    pub fn hamiltonian(&self) -> Result<ControlledHamiltonian> {
        let one = ComplexMatrix::identity(self.atom_dim());
        ControlledHamiltonian::new(self.interaction.clone(), self.h_i.kron(&one)?, one.kron(&self.h_ii.transpose())?)
    }

    /// Per-atom diagonal detection `L1 = i r N (x) 1`, `L2 = i r 1 (x) N` with
    /// `N = diag(0, 1, ..., d - 1)`.
    pub fn detection_scheme(&self) -> Result<DetectionScheme> {
        let d = self.atom_dim();
        let one = ComplexMatrix::identity(d);
        let n = ComplexMatrix::diagonal(&(0..d).map(|k| Complex64::new(0.0, self.rate * k as f64)).collect::<Vec<_>>())?;
        DetectionScheme::custom(vec![n.kron(&one)?, one.kron(&n)?])
    }
}
