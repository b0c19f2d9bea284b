//! Numerical laboratory for the strong-coupling polaron.
//!
//! The pipeline runs bottom-up:
//!
//! * [`radial`]: uniform radial grids, Newton-theorem Coulomb potentials and
//!   radial Fourier transforms;
//! * [`solver`]: the minimizer of the Pekar functional by self-consistent
//!   iteration, cross-checked by a normalized gradient flow;
//! * [`momentum`]: the momentum-space profile, the Pekar field and the
//!   strong-coupling limit functionals of the ground state;
//! * [`mass`]: the regularized trial profile and the inverse-mass bound
//!   `f(ε)`;
//! * [`report`]: configuration, commands and artifacts behind the `polaron`
//!   binary.

pub mod error;
pub mod mass;
pub mod momentum;
pub mod parallel;
pub mod radial;
pub mod report;
pub mod solver;

pub use error::{PolaronError, Result};
