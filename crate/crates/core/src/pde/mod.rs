//! Heat semigroups and backward HJB-Isaacs solvers on the circle, the flat 2-torus and the
//! round 2-sphere.
//!
//! Grids carry a diffusion scale `kappa`, so the generator is `kappa * Delta_LB`. Heat flow
//! is spectral (FFT on flat grids, spherical harmonics on a Gaussian grid). Hamiltonians are
//! evaluated at nodes, with the metric gradient given as a coordinate covector.

mod circle;
mod fd;
mod field;
mod grid;
mod mild;
mod value;
mod sht;

pub use grid::{heat_apply, metric_gradient, stereographic_gradient, stereographic_to_sphere, GridFunction, Manifold, ManifoldGrid};
pub use field::{coupled, field, sampled_lipschitz, CoupledField, FnCoupled, FnField, HamiltonianField};
pub use mild::{mild_solve, vector_mild_solve, MildConfig};
pub use value::ValueFunction;
pub use fd::{fd_solve, fd_stability_limit, FdConfig};
pub use circle::{circle_lambda, circle_lambda_scaled, discounted_solve_circle, smoothing_estimate_check, DiscountedCircle, SmoothingRow, StationaryCircle, stationary_solve_circle};
