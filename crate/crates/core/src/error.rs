use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The state left the projective chart (`chi_0 = 0`, or `|w|` beyond the guard).
    #[error("state outside the projective chart (|w| = {norm:e}, guard {guard:e})")]
    ChartExit { norm: f64, guard: f64 },

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("fixed-point iteration did not converge after {} iterations (last residual {:e})", .residuals.len(), .residuals.last().copied().unwrap_or(f64::NAN))]
    Divergence { residuals: Vec<f64> },

    #[error("time step {dt:e} violates the stability limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("degenerate parameters: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures of a numerical method, as opposed to invalid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Divergence { .. } | Error::Cfl { .. } | Error::ChartExit { .. }
        )
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
