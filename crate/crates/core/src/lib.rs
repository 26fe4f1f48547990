//! Quantum filtering under special homodyne detection schemes, and the drift-control
//! games they induce.
//!
//! The crate is organised bottom-up:
//!
//! - [`quantum`]: small dense complex matrices, state vectors, projective charts and the
//!   generalized Pauli (Gell-Mann) families.
//! - [`filtering`]: Euler–Maruyama stepping of the linear Belavkin equation, in state space
//!   and in projective coordinates, for the sphere, projective-space, torus and Euclidean
//!   detection schemes.
//! - [`analysis`]: drift and quadratic-variation coefficients of the filtered diffusion and
//!   the checks identifying its generator with a Laplace–Beltrami operator.
//! - [`pde`]: heat semigroups on the circle, the 2-torus and the 2-sphere, and backward
//!   HJB-Isaacs solvers (mild fixed point, explicit finite differences, coupled systems,
//!   exact circle solutions).
//! - [`games`]: game specifications built from quantum data, Isaacs Hamiltonians,
//!   bang-bang policies and Monte Carlo policy evaluation.
//!
//! Data-parallel loops (Monte Carlo ensembles, pointwise Hamiltonian evaluation) run on
//! rayon when the `parallel` feature is enabled and sequentially otherwise; see [`exec`].

pub mod analysis;
pub mod error;
pub mod exec;
pub mod filtering;
pub mod games;
pub mod pde;
pub mod quantum;
pub mod rng;

pub use error::{Error, Result};
pub use num_complex::Complex64;
