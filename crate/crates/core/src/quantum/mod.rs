//! Complex linear algebra for small dense operators, pure states and projective charts.

mod gell_mann;
mod matrix;
mod state;

pub use gell_mann::{gell_mann, pauli, sigma_x, sigma_y, sigma_z, trace_inner};
pub use matrix::{ComplexMatrix, HERMITIAN_TOL, MAX_DIM};
pub(crate) use state::raw_expectation;
pub use state::{expectation, expectation_of_chart, ProjectiveState, StateVector};
