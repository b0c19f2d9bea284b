//! Radial Fourier transforms by direct quadrature.
//!
//! Two conventions are used in the crate:
//!
//! * **unitary** (wave functions): `f̂(p) = (2π)^{-3/2} ∫ f(x) e^{-ip·x} dx
//!   = √(2/π) p⁻¹ ∫_0^∞ r sin(pr) f(r) dr`. Preserves the L² norm and is its
//!   own inverse on radial functions.
//! * **raw** (densities): `ρ̂(p) = ∫ ρ(x) e^{-ip·x} dx = 4π p⁻¹ ∫_0^∞ r sin(pr) ρ(r) dr`,
//!   so `ρ̂(0) = ∫ρ`.

use std::f64::consts::PI;
use std::sync::Arc;

use super::grid::{Parity, RadialFunction, RadialGrid};
use crate::parallel;

fn sine_moment(f: &RadialFunction, p: f64) -> f64 {
    let grid = f.grid();
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(f.values())
        .map(|((&r, &w), &v)| w * r * (p * r).sin() * v)
        .sum()
}

fn transform_with(f: &RadialFunction, pgrid: &Arc<RadialGrid>, prefactor: f64) -> RadialFunction {
    let p = pgrid.nodes();
    let values = parallel::map_indexed(p.len(), |j| prefactor * sine_moment(f, p[j]) / p[j]);
    RadialFunction::new(pgrid.clone(), values, Parity::Even).expect("transform of finite samples is finite")
}

/// Unitary transform of a real radial function onto `pgrid`.
pub fn fourier_radial(f: &RadialFunction, pgrid: &Arc<RadialGrid>) -> RadialFunction {
    transform_with(f, pgrid, (2.0 / PI).sqrt())
}

/// Raw transform of a radial density onto `pgrid`.
pub fn fourier_density(rho: &RadialFunction, pgrid: &Arc<RadialGrid>) -> RadialFunction {
    transform_with(rho, pgrid, 4.0 * PI)
}

/// `d/dp` of the unitary transform, by differentiating under the integral:
/// `√(2/π) [ p⁻¹ ∫ r² cos(pr) f dr − p⁻² ∫ r sin(pr) f dr ]`.
pub fn fourier_radial_derivative(f: &RadialFunction, pgrid: &Arc<RadialGrid>) -> RadialFunction {
    let grid = f.grid();
    let p = pgrid.nodes();
    let pref = (2.0 / PI).sqrt();
    let values = parallel::map_indexed(p.len(), |j| {
        let pj = p[j];
        let (mut cos_m, mut sin_m) = (0.0, 0.0);
        for ((&r, &w), &v) in grid.nodes().iter().zip(grid.weights()).zip(f.values()) {
            let (s, c) = (pj * r).sin_cos();
            cos_m += w * r * r * c * v;
            sin_m += w * r * s * v;
        }
        pref * (cos_m / pj - sin_m / (pj * pj))
    });
    RadialFunction::new(pgrid.clone(), values, Parity::Odd).expect("finite derivative")
}
