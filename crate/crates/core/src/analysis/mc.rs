use crate::error::Result;
use crate::exec::{map_indexed, mean_stderr, Execution};
use crate::filtering::{step_projective_guarded, DetectionScheme, NoiseKind};
use crate::quantum::{ComplexMatrix, ProjectiveState};
use crate::rng::{fill_increments, path_rng};

/// Monte Carlo estimate of a generator value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub analytic: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `|estimate - analytic|` in units of the standard error.
    pub fn z_score(&self) -> f64 {
        (self.estimate - self.analytic).abs() / self.stderr
    }
}

/// Estimates `(E f(X_h) - f(w)) / h` from `n_samples` single Euler–Maruyama steps of
/// length `h` driven by standard (innovation) noise, sample `i` using stream `(seed, i)`.
#[allow(clippy::too_many_arguments)]
pub fn mc_generator_check(
    scheme: &DetectionScheme,
    hamiltonian: &ComplexMatrix,
    f: &(dyn Fn(&ProjectiveState) -> f64 + Sync),
    analytic: f64,
    w: &ProjectiveState,
    h: f64,
    n_samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<McEstimate> {
    // Validates dimensions once, so the per-sample steps below cannot fail on them.
    step_projective_guarded(
        w,
        hamiltonian,
        scheme,
        &vec![0.0; scheme.channels()],
        h,
        NoiseKind::Innovation,
        f64::INFINITY,
    )?;
    let f0 = f(w);
    let samples = map_indexed(exec, n_samples, |i| {
        let mut rng = path_rng(seed, i as u64);
        let mut db = vec![0.0; scheme.channels()];
        fill_increments(&mut rng, h, &mut db);
        let next = step_projective_guarded(
            w,
            hamiltonian,
            scheme,
            &db,
            h,
            NoiseKind::Innovation,
            f64::INFINITY,
        )
        .expect("dimensions validated above");
        (f(&next) - f0) / h
    });
    let (estimate, stderr) = mean_stderr(&samples);
    Ok(McEstimate {
        estimate,
        analytic,
        stderr,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn pauli_linear_function_has_zero_generator() {
        let est = mc_generator_check(
            &DetectionScheme::pauli(),
            &ComplexMatrix::zeros(2),
            &|w| w.coords()[0].re,
            0.0,
            &ProjectiveState::origin(1),
            1e-3,
            20_000,
            1,
            Execution::default(),
        )
        .unwrap();
        assert!(est.z_score() < 4.0, "{est:?}");
    }

    #[test]
    fn torus_cosine_generator() {
        let phi: f64 = 0.7;
        let w = ProjectiveState::new(vec![Complex64::from_polar(1.0, phi)]).unwrap();
        let est = mc_generator_check(
            &DetectionScheme::torus_diagonal(&[1.0]).unwrap(),
            &ComplexMatrix::zeros(2),
            &|w| w.coords()[0].arg().cos(),
            -0.5 * phi.cos(),
            &w,
            1e-3,
            50_000,
            2,
            Execution::default(),
        )
        .unwrap();
        assert!(est.z_score() < 4.0, "{est:?}");
    }
}
