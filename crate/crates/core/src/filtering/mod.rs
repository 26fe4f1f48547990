//! Euler–Maruyama integration of the filtering equations.
//!
//! States are evolved either as the unnormalized vector `chi` of the linear Belavkin
//! equation
//!
//! ```text
//! d chi = -[i H chi + 1/2 sum_j L_j* L_j chi] dt + sum_j L_j chi dY^j
//! ```
//!
//! or in the projective chart `w_k = chi_k / chi_0`, where the Ito calculus produces the
//! drift and noise coefficients computed by [`projective_coefficients`]. Specialised
//! steppers cover the Pauli sphere, the torus angles and the Euclidean column scheme.

mod coefficients;
mod hamiltonian;
mod scheme;
mod step;
pub(crate) mod trajectory;

pub use coefficients::{
    channel_means, hamiltonian_drift, projective_coefficients, NoiseKind, ProjectiveCoefficients,
};
pub use hamiltonian::ControlledHamiltonian;
pub use scheme::{DetectionScheme, SchemeKind};
pub use step::{
    innovation_increment, step_euclidean, step_linear_chi, step_pauli_qubit, step_projective,
    step_projective_guarded, step_torus_angles, wrap_angle,
};
pub use trajectory::{
    simulate_trajectory, ConstantControl, FeedbackPolicy, PolicyState, Representation,
    Trajectory, TrajectoryConfig, TrajectoryStates, Truncation,
};
