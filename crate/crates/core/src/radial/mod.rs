//! Grids, quadrature, derivatives, Coulomb kernels and radial Fourier
//! transforms for rotation-invariant functions on ℝ³.

mod coulomb;
mod fourier;
mod gauss;
mod grid;
mod interp;

pub use coulomb::{coulomb_bilinear, coulomb_potential};
pub use fourier::{fourier_density, fourier_radial, fourier_radial_derivative};
pub use gauss::GaussLegendre;
pub use grid::{build_grid, integrate_3d, radial_derivative, Parity, RadialFunction, RadialGrid};
pub use interp::MonotoneCubic;
