//! Momentum-space data of the Pekar minimizer and the classical limit
//! functionals of the strong-coupling ground state.
//!
//! Conventions: `ψ̂` is the unitary transform (so `∫|ψ̂|² = 1`), and the
//! Pekar field is `φ(p) = ρ̂(p) / (√2 π |p|)` with the raw density transform
//! `ρ̂`. The field energy `∫φ²` equals the Coulomb self-energy `D`.

mod quadrature;

use std::f64::consts::{PI, SQRT_2};
use std::sync::Arc;

use crate::error::{PolaronError, Result};
use crate::parallel;
use crate::radial::{
    fourier_density, fourier_radial, fourier_radial_derivative, radial_derivative, MonotoneCubic, Parity,
    RadialFunction, RadialGrid,
};
use crate::solver::PekarState;

pub(crate) use quadrature::shifted_norm;
pub use quadrature::{AngularQuadrature, ANGULAR_REDUCTION, DEFAULT_ANGULAR_NODES, DEFAULT_REDUCED_N};

pub const DEFAULT_MOMENTUM_N: usize = 2500;
pub const DEFAULT_PMAX: f64 = 2.5;

#[derive(Debug, Clone)]
pub struct MomentumProfile {
    pub psi_hat: RadialFunction,
    /// `ψ̂'(p)`, so that `∇ψ̂(p) = p̂ ψ̂'(p)`.
    pub dpsi_hat: RadialFunction,
    pub rho_hat: RadialFunction,
    pub phi: RadialFunction,
    pub mu: f64,
    /// `∫ φ² dp`
    pub field_energy: f64,
    /// Sup-norm gap between the analytic `ψ̂'` and the finite-difference
    /// derivative of `ψ̂` on `[p_min, pmax/2]`.
    pub derivative_mismatch: f64,
    psi_hat_interp: MonotoneCubic,
    dpsi_hat_interp: MonotoneCubic,
    rho_hat_interp: MonotoneCubic,
}

/// Build the momentum profile of a converged state on `pgrid`.
///
/// Fails with a domain error if `ψ̂` is not strictly positive on the grid,
/// which happens once `pgrid` reaches the momenta where `ψ̂` sinks below the
/// quadrature noise of the position grid.
pub fn momentum_profile(state: &PekarState, pgrid: &Arc<RadialGrid>) -> Result<MomentumProfile> {
    let psi_hat = fourier_radial(&state.psi, pgrid);
    if let Some((p, v)) = pgrid.nodes().iter().zip(psi_hat.values()).find(|(_, &v)| v <= 0.0) {
        return Err(PolaronError::DomainFailure(format!(
            "psi_hat({p}) = {v:e} is not positive; lower pmax or enlarge rmax"
        )));
    }
    let dpsi_hat = fourier_radial_derivative(&state.psi, pgrid);
    let rho_hat = fourier_density(&state.rho, pgrid);
    let phi = rho_hat.map(|p, v| v / (SQRT_2 * PI * p))?;
    let phi = RadialFunction::new(pgrid.clone(), phi.values().to_vec(), Parity::Odd)?;

    let field_density: Vec<f64> = pgrid
        .nodes()
        .iter()
        .zip(phi.values())
        .map(|(p, f)| 4.0 * PI * p * p * f * f)
        .collect();
    let field_energy = pgrid.integrate_with_origin(&field_density);

    let fd = radial_derivative(&psi_hat)?;
    let half = 0.5 * pgrid.rmax();
    let derivative_mismatch = pgrid
        .nodes()
        .iter()
        .zip(fd.values().iter().zip(dpsi_hat.values()))
        .filter(|(&p, _)| p <= half)
        .map(|(_, (a, b))| (a - b).abs())
        .fold(0.0, f64::max);

    Ok(MomentumProfile {
        psi_hat_interp: MonotoneCubic::new(&psi_hat),
        dpsi_hat_interp: MonotoneCubic::new(&dpsi_hat),
        rho_hat_interp: MonotoneCubic::new(&rho_hat),
        psi_hat,
        dpsi_hat,
        rho_hat,
        phi,
        mu: state.mu,
        field_energy,
        derivative_mismatch,
    })
}

impl MomentumProfile {
    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.psi_hat.grid()
    }

    pub fn pmax(&self) -> f64 {
        self.grid().rmax()
    }

    /// `∫ |ψ̂|² dp`
    pub fn norm_squared(&self) -> f64 {
        crate::radial::integrate_3d(&self.psi_hat.product(&self.psi_hat).expect("same grid"))
    }

    pub fn psi_hat_at(&self, p: f64) -> f64 {
        self.psi_hat_interp.eval(p)
    }

    pub fn dpsi_hat_at(&self, p: f64) -> f64 {
        self.dpsi_hat_interp.eval(p)
    }

    pub fn rho_hat_at(&self, p: f64) -> f64 {
        self.rho_hat_interp.eval(p)
    }

    /// `|k| φ(k) = ρ̂(k) / (√2 π)`, finite at `k = 0`.
    pub fn k_phi_at(&self, k: f64) -> f64 {
        self.rho_hat_interp.eval(k) / (SQRT_2 * PI)
    }
}

/// Real radial test profile `g(p)` or `ξ(k)`.
#[derive(Clone)]
pub struct RadialTestFunction {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    bounded: bool,
}

impl std::fmt::Debug for RadialTestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialTestFunction")
            .field("bounded", &self.bounded)
            .finish_non_exhaustive()
    }
}

impl RadialTestFunction {
    pub fn new(f: impl Fn(f64) -> f64 + Send + Sync + 'static, bounded: bool) -> Self {
        RadialTestFunction {
            f: Arc::new(f),
            bounded,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_| c, true)
    }

    pub fn eval(&self, p: f64) -> f64 {
        (self.f)(p)
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    fn check_finite_on(&self, grid: &RadialGrid) -> Result<()> {
        match grid.nodes().iter().find(|&&p| !self.eval(p).is_finite()) {
            Some(p) => Err(PolaronError::invalid(format!("test function is not finite at p = {p}"))),
            None => Ok(()),
        }
    }
}

/// Weighted L² norm of `(p² + μ) ψ̂(p) − (√2/π) ∫ dk φ(k)/|k| ψ̂(p + k)` on
/// the reduced momentum grid.
///
/// With `|k| φ(k) = ρ̂(k)/(√2π)` the convolution reduces to
/// `(2/π) ∫_0^∞ dk ρ̂(k) ∫_{-1}^{1} dc ψ̂(|p + k|)`.
pub fn el_residual_momentum(mp: &MomentumProfile, quad: &AngularQuadrature) -> Result<f64> {
    let nodes = quad.nodes(mp.pmax())?;
    let gl = quad.angular();
    let rho_k: Vec<f64> = nodes.k.iter().map(|&k| mp.rho_hat_at(k)).collect();
    let residuals = parallel::map_indexed(nodes.p.len(), |i| {
        let p = nodes.p[i];
        let mut conv = 0.0;
        for ((&k, &wk), &rk) in nodes.k.iter().zip(&nodes.wk).zip(&rho_k) {
            let c_int = gl.integrate(|c| mp.psi_hat_at(shifted_norm(p, k, c)));
            conv += wk * rk * c_int;
        }
        conv *= 2.0 / PI;
        (p * p + mp.mu) * mp.psi_hat_at(p) - conv
    });
    let sum: f64 = nodes
        .p
        .iter()
        .zip(&nodes.wp)
        .zip(&residuals)
        .map(|((p, w), r)| w * p * p * r * r)
        .sum();
    Ok((4.0 * PI * sum).sqrt())
}

/// `∫ dp |ψ̂(p)|² g(|p|)`.
pub fn lemma1_density_expectation(mp: &MomentumProfile, g: &RadialTestFunction) -> Result<f64> {
    let grid = mp.grid();
    g.check_finite_on(grid)?;
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(mp.psi_hat.values())
        .map(|((&p, &w), &v)| w * p * p * v * v * g.eval(p))
        .sum();
    Ok(4.0 * PI * sum)
}

/// `(∫ φ²) · ∫ |ψ̂|² g`; `g` must be bounded.
pub fn lemma1_number_expectation(mp: &MomentumProfile, g: &RadialTestFunction) -> Result<f64> {
    if !g.is_bounded() {
        return Err(PolaronError::invalid(
            "the phonon-number functional needs a bounded test function",
        ));
    }
    Ok(mp.field_energy * lemma1_density_expectation(mp, g)?)
}

/// `∬ dk dp φ(k) ξ(k) ψ̂(p + k) g(p + k) ψ̂(p) g(p)` by angular reduction.
pub fn lemma1_cross(
    mp: &MomentumProfile,
    xi: &RadialTestFunction,
    g: &RadialTestFunction,
    quad: &AngularQuadrature,
) -> Result<f64> {
    xi.check_finite_on(mp.grid())?;
    g.check_finite_on(mp.grid())?;
    let nodes = quad.nodes(mp.pmax())?;
    let gl = quad.angular();
    // k² φ(k) ξ(k) = k · (kφ) · ξ, zero at the origin
    let k_factor: Vec<f64> = nodes
        .k
        .iter()
        .map(|&k| if k == 0.0 { 0.0 } else { k * mp.k_phi_at(k) * xi.eval(k) })
        .collect();
    if k_factor.iter().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    let rows = parallel::map_indexed(nodes.p.len(), |i| {
        let p = nodes.p[i];
        let outer = mp.psi_hat_at(p) * g.eval(p);
        if outer == 0.0 {
            return 0.0;
        }
        let mut inner = 0.0;
        for ((&k, &wk), &kf) in nodes.k.iter().zip(&nodes.wk).zip(&k_factor) {
            if kf == 0.0 {
                continue;
            }
            let c_int = gl.integrate(|c| {
                let q = shifted_norm(p, k, c);
                mp.psi_hat_at(q) * g.eval(q)
            });
            inner += wk * kf * c_int;
        }
        nodes.wp[i] * p * p * outer * inner
    });
    Ok(ANGULAR_REDUCTION * rows.iter().sum::<f64>())
}

/// The same functional with the roles swapped: substituting `s = p + k`, both
/// `ψ̂g` factors are sampled on grid nodes and the field factor `φξ` is taken
/// at the off-grid argument `|s − p|`.
pub fn lemma1_cross_swapped(
    mp: &MomentumProfile,
    xi: &RadialTestFunction,
    g: &RadialTestFunction,
    quad: &AngularQuadrature,
) -> Result<f64> {
    let nodes = quad.nodes(mp.pmax())?;
    let gl = quad.angular();
    let f: Vec<f64> = nodes.p.iter().map(|&p| mp.psi_hat_at(p) * g.eval(p)).collect();
    let rows = parallel::map_indexed(nodes.p.len(), |i| {
        let p = nodes.p[i];
        let mut inner = 0.0;
        for ((&s, &ws), &fs) in nodes.p.iter().zip(&nodes.wp).zip(&f) {
            let c_int = gl.integrate(|c| {
                let k = shifted_norm(p, s, -c);
                if k == 0.0 {
                    0.0
                } else {
                    mp.k_phi_at(k) / k * xi.eval(k)
                }
            });
            inner += ws * s * s * fs * c_int;
        }
        nodes.wp[i] * p * p * f[i] * inner
    });
    Ok(ANGULAR_REDUCTION * rows.iter().sum::<f64>())
}

/// One-dimensional form of [`lemma1_cross`] at `g ≡ 1`, using
/// `∫ dp ψ̂(p + k) ψ̂(p) = ρ̂(k)`: `4π ∫ k² φ(k) ξ(k) ρ̂(k) dk`.
pub fn lemma1_cross_unit_g(mp: &MomentumProfile, xi: &RadialTestFunction) -> Result<f64> {
    let grid = mp.grid();
    xi.check_finite_on(grid)?;
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(mp.phi.values().iter().zip(mp.rho_hat.values()))
        .map(|((&k, &w), (&phi, &rho))| w * k * k * phi * xi.eval(k) * rho)
        .sum();
    Ok(4.0 * PI * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::build_grid;
    use crate::solver::{solve_pekar, SolverOptions};
    use std::sync::OnceLock;

    fn profile() -> &'static (PekarState, MomentumProfile) {
        static CELL: OnceLock<(PekarState, MomentumProfile)> = OnceLock::new();
        CELL.get_or_init(|| {
            let state = solve_pekar(&SolverOptions::default()).unwrap();
            let pgrid = Arc::new(build_grid(DEFAULT_MOMENTUM_N, DEFAULT_PMAX).unwrap());
            let mp = momentum_profile(&state, &pgrid).unwrap();
            (state, mp)
        })
    }

    #[test]
    fn plancherel_and_field_energy() {
        let (state, mp) = profile();
        assert!((mp.norm_squared() - 1.0).abs() < 1e-5);
        assert!((mp.field_energy / state.coulomb - 1.0).abs() < 1e-4);
        assert!(mp.psi_hat.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn field_is_scaled_density_transform() {
        let (_, mp) = profile();
        for ((&p, &phi), &rho) in mp.grid().nodes().iter().zip(mp.phi.values()).zip(mp.rho_hat.values()) {
            let back = SQRT_2 * PI * p * phi;
            assert!((back - rho).abs() <= 1e-12 * rho.abs().max(1e-300) + 1e-300, "{p}");
        }
    }

    #[test]
    fn analytic_and_finite_difference_derivatives_agree() {
        let (_, mp) = profile();
        assert!(mp.derivative_mismatch < 1e-4, "{}", mp.derivative_mismatch);
    }

    #[test]
    fn derivative_vanishes_linearly_at_origin() {
        let (_, mp) = profile();
        let d = mp.dpsi_hat.values();
        let p = mp.grid().nodes();
        let ratios: Vec<f64> = (0..3).map(|i| d[i] / p[i]).collect();
        let at_zero = 3.0 * ratios[0] - 3.0 * ratios[1] + ratios[2];
        assert!(at_zero.is_finite() && at_zero < 0.0);
        assert!((ratios[0] / at_zero - 1.0).abs() < 1e-3);
    }

    #[test]
    fn momentum_residual_small_for_minimizer() {
        let (state, mp) = profile();
        let res = el_residual_momentum(mp, &AngularQuadrature::default()).unwrap();
        assert!(res <= 1e-3, "{res}");
        assert!(state.residual <= 1e-6);
    }

    #[test]
    fn momentum_residual_large_for_gaussian() {
        let (state, _) = profile();
        let g = RadialFunction::from_fn(state.grid().clone(), Parity::Even, |r| {
            PI.powf(-0.75) * (-0.5 * r * r).exp()
        })
        .unwrap();
        let impostor = PekarState::from_psi(g).unwrap();
        let pgrid = Arc::new(build_grid(1000, 6.0).unwrap());
        let mp = momentum_profile(&impostor, &pgrid).unwrap();
        let res = el_residual_momentum(&mp, &AngularQuadrature::default()).unwrap();
        assert!(res > 1e-1, "{res}");
    }

    #[test]
    fn density_expectation() {
        let (state, mp) = profile();
        let one = lemma1_density_expectation(mp, &RadialTestFunction::constant(1.0)).unwrap();
        assert!((one - 1.0).abs() < 1e-5);
        let kinetic = lemma1_density_expectation(mp, &RadialTestFunction::new(|p| p * p, false)).unwrap();
        assert!(
            (kinetic / state.kinetic - 1.0).abs() < 1e-4,
            "{kinetic} vs {}",
            state.kinetic
        );
        let bounded = lemma1_density_expectation(mp, &RadialTestFunction::new(|p| 2.0 / (1.0 + p), true)).unwrap();
        assert!((0.0..=2.0).contains(&bounded));
    }

    #[test]
    fn number_expectation() {
        let (state, mp) = profile();
        let one = RadialTestFunction::constant(1.0);
        let n1 = lemma1_number_expectation(mp, &one).unwrap();
        assert!((n1 / state.coulomb - 1.0).abs() < 1e-4);
        assert_eq!(
            lemma1_number_expectation(mp, &RadialTestFunction::constant(0.0)).unwrap(),
            0.0
        );
        let g = RadialTestFunction::new(|p| (-p).exp(), true);
        let lhs = lemma1_number_expectation(mp, &g).unwrap();
        let rhs = state.coulomb * lemma1_density_expectation(mp, &g).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-4);
        let unbounded = RadialTestFunction::new(|p| p * p, false);
        assert!(matches!(
            lemma1_number_expectation(mp, &unbounded),
            Err(PolaronError::InvalidArgument(_))
        ));
    }

    #[test]
    fn cross_functional() {
        let (_, mp) = profile();
        let quad = AngularQuadrature::default();
        let xi = RadialTestFunction::new(|k| (-k * k).exp(), true);
        let one = RadialTestFunction::constant(1.0);

        assert_eq!(
            lemma1_cross(mp, &RadialTestFunction::constant(0.0), &one, &quad).unwrap(),
            0.0
        );

        let full = lemma1_cross(mp, &xi, &one, &quad).unwrap();
        let reduced = lemma1_cross_unit_g(mp, &xi).unwrap();
        assert!((full / reduced - 1.0).abs() < 1e-3, "{full} vs {reduced}");

        let g = RadialTestFunction::new(|p| 1.0 / (1.0 + p * p), true);
        let minus_g = RadialTestFunction::new(|p| -1.0 / (1.0 + p * p), true);
        let a = lemma1_cross(mp, &xi, &g, &quad).unwrap();
        let b = lemma1_cross(mp, &xi, &minus_g, &quad).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());

        let swapped = lemma1_cross_swapped(mp, &xi, &g, &quad).unwrap();
        assert!((a / swapped - 1.0).abs() < 1e-3, "{a} vs {swapped}");
    }
}
