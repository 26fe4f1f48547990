//! Local coefficients of the filtered diffusion and the checks that identify its
//! generator with a Laplace–Beltrami operator.
//!
//! Coefficients are computed from the noise rows of the projective equation in
//! double-double arithmetic and rounded once, so that polynomial identities between them
//! (vanishing drift, conformal quadratic variation) hold to the last bit even where the
//! coefficients themselves are of size `10^4`.

mod coefficients;
mod dd;
mod generator;
mod isothermal;
mod mc;

pub use coefficients::{complex_diffusion, local_coefficients, ComplexDiffusion, LocalCoefficients};
pub use generator::{
    analyze_scheme, innovation_invariance_check, projective_diffusion_target,
    sample_chart_point, verify_projective_generator, verify_sphere_generator,
    ProjectiveGeneratorReport, SchemeReport,
};
pub use isothermal::{check_isothermal, IsothermalReport};
pub use mc::{mc_generator_check, McEstimate};
