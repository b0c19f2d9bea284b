//! Minimizer of the Pekar functional
//! `E[ψ] = ∫|∇ψ|² − ∬ |ψ(x)|²|ψ(y)|² / |x − y|`, `‖ψ‖₂ = 1`,
//! restricted to nonnegative radial profiles centred at the origin.
//!
//! Everything is discretized on the reduced radial problem `u = rψ` with the
//! three-point Laplacian and Dirichlet walls at `r = 0` and `r = rmax`. The
//! kinetic energy is the matching discrete Dirichlet form, so the
//! self-consistent fixed point is an exact stationary point of the discrete
//! functional and `λ = T − 2D` holds to round-off.

mod flow;
mod tridiag;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{PolaronError, Result};
use crate::radial::{
    build_grid, coulomb_bilinear, coulomb_potential, integrate_3d, Parity, RadialFunction, RadialGrid,
};

pub use flow::{imaginary_time_flow, imaginary_time_oracle, FlowTrace, DEFAULT_FLOW_STEP};
pub use tridiag::{lowest_eigenpair, solve_shifted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialProfile {
    /// `ψ₀ ∝ e^{−r}`
    Hydrogenic,
    /// `ψ₀ ∝ e^{−r²/4}`
    Gaussian,
}

impl std::str::FromStr for InitialProfile {
    type Err = PolaronError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hydrogenic" => Ok(InitialProfile::Hydrogenic),
            "gaussian" => Ok(InitialProfile::Gaussian),
            other => Err(PolaronError::invalid(format!(
                "unknown initial profile {other:?} (expected hydrogenic or gaussian)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverOptions {
    pub n: usize,
    pub rmax: f64,
    pub init: InitialProfile,
    pub mixing: f64,
    pub tol_energy: f64,
    pub tol_psi: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            n: 3000,
            rmax: 30.0,
            init: InitialProfile::Hydrogenic,
            mixing: 0.5,
            tol_energy: 1e-10,
            tol_psi: 1e-8,
            max_iter: 500,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(PolaronError::invalid(format!(
                "solver grid needs n >= 4, got {}",
                self.n
            )));
        }
        if !(self.rmax > 0.0 && self.rmax.is_finite()) {
            return Err(PolaronError::invalid(format!(
                "rmax must be positive, got {}",
                self.rmax
            )));
        }
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(PolaronError::invalid(format!(
                "mixing must lie in (0, 1], got {}",
                self.mixing
            )));
        }
        if !(self.tol_energy > 0.0 && self.tol_psi > 0.0) {
            return Err(PolaronError::invalid("tolerances must be positive"));
        }
        if self.max_iter == 0 {
            return Err(PolaronError::invalid("max_iter must be positive"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<RadialGrid>> {
        Ok(Arc::new(build_grid(self.n, self.rmax)?))
    }
}

/// The Pekar minimizer together with its energy decomposition.
#[derive(Debug, Clone)]
pub struct PekarState {
    pub psi: RadialFunction,
    pub rho: RadialFunction,
    /// `T = ∫|∇ψ|²`
    pub kinetic: f64,
    /// `D = ∬ ρρ / |x − y|`
    pub coulomb: f64,
    /// `e^P = T − D`
    pub energy: f64,
    /// `μ = D − e^P = 2D − T`
    pub mu: f64,
    pub iterations: usize,
    /// Position-space Euler–Lagrange residual of `psi`.
    pub residual: f64,
}

/// One self-consistent iteration, kept for convergence diagnostics.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub energy: f64,
    pub energy_change: f64,
    pub psi_change: f64,
    pub eigenvalue: f64,
}

impl PekarState {
    /// Normalize `psi` and fill in the energy decomposition.
    pub fn from_psi(psi: RadialFunction) -> Result<Self> {
        Self::assemble(psi, 0)
    }

    fn assemble(psi: RadialFunction, iterations: usize) -> Result<Self> {
        let psi = normalized(&psi)?;
        let rho = psi.product(&psi)?;
        let kinetic = dirichlet_kinetic(&psi);
        let coulomb = coulomb_bilinear(&rho, &rho)?;
        let energy = kinetic - coulomb;
        let mut state = PekarState {
            psi,
            rho,
            kinetic,
            coulomb,
            energy,
            mu: coulomb - energy,
            iterations,
            residual: 0.0,
        };
        state.residual = el_residual_position(&state);
        Ok(state)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        self.psi.grid()
    }

    /// `λ = ⟨ψ, (−Δ − 2Φ_ρ) ψ⟩ = T − 2D`.
    pub fn lagrange_multiplier(&self) -> f64 {
        self.kinetic - 2.0 * self.coulomb
    }
}

fn normalized(psi: &RadialFunction) -> Result<RadialFunction> {
    let norm = integrate_3d(&psi.product(psi)?).sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(PolaronError::NumericalFailure(
            "cannot normalize a vanishing profile".into(),
        ));
    }
    psi.map(|_, v| v / norm)
}

pub(crate) fn l2_distance(a: &RadialFunction, b: &RadialFunction) -> Result<f64> {
    a.check_same_grid(b)?;
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .collect();
    Ok(integrate_3d(&RadialFunction::new(a.grid().clone(), values, Parity::Even)?).sqrt())
}

/// Discrete Dirichlet form `4π Σ (u_{i+1} − u_i)² / h`, `u = rψ`, `u_0 = 0`.
fn dirichlet_kinetic(psi: &RadialFunction) -> f64 {
    let grid = psi.grid();
    let h = grid.spacing();
    let mut prev = 0.0;
    let mut sum = 0.0;
    for (&r, &v) in grid.nodes().iter().zip(psi.values()) {
        let u = r * v;
        sum += (u - prev) * (u - prev);
        prev = u;
    }
    4.0 * PI * sum / h
}

fn initial_profile(grid: &Arc<RadialGrid>, init: InitialProfile) -> Result<RadialFunction> {
    let n = grid.len();
    let mut psi = RadialFunction::from_fn(grid.clone(), Parity::Even, |r| match init {
        InitialProfile::Hydrogenic => (-r).exp(),
        InitialProfile::Gaussian => (-0.25 * r * r).exp(),
    })?;
    psi = psi.map(|r, v| if r >= grid.nodes()[n - 1] { 0.0 } else { v })?;
    normalized(&psi)
}

/// Minimize the Pekar functional by self-consistent iteration with density
/// mixing.
///
/// Each step solves the lowest eigenpair of `−d²/dr² − 2Φ[ρ_n]` for
/// `u = rψ` and mixes `ρ_{n+1} = (1 − β) ρ_n + β |ψ_new|²`. Converged when
/// both the energy change and the L² change of ψ drop below their
/// tolerances.
pub fn solve_pekar(opts: &SolverOptions) -> Result<PekarState> {
    opts.validate()?;
    let grid = opts.grid()?;
    let n = grid.len();
    let h = grid.spacing();
    let r = grid.nodes().to_vec();

    let mut psi = initial_profile(&grid, opts.init)?;
    let mut rho_mix = psi.product(&psi)?;
    let mut energy = {
        let d = coulomb_bilinear(&rho_mix, &rho_mix)?;
        dirichlet_kinetic(&psi) - d
    };
    let mut history = Vec::new();
    let off = -1.0 / (h * h);

    for iteration in 1..=opts.max_iter {
        let phi = coulomb_potential(&rho_mix);
        let diag: Vec<f64> = phi.values()[..n - 1].iter().map(|&p| 2.0 / (h * h) - 2.0 * p).collect();
        let guess: Vec<f64> = (0..n - 1).map(|i| r[i] * psi.values()[i]).collect();
        let (eigenvalue, mut u) = lowest_eigenpair(&diag, off, Some(&guess))?;
        if u.iter().sum::<f64>() < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        let mut values: Vec<f64> = (0..n - 1).map(|i| u[i] / r[i]).collect();
        values.push(0.0);
        let new_psi = normalized(&RadialFunction::new(grid.clone(), values, Parity::Even)?)?;
        let new_rho = new_psi.product(&new_psi)?;

        let new_energy = dirichlet_kinetic(&new_psi) - coulomb_bilinear(&new_rho, &new_rho)?;
        let psi_change = l2_distance(&new_psi, &psi)?;
        let energy_change = (new_energy - energy).abs();
        history.push(IterationRecord {
            iteration,
            energy: new_energy,
            energy_change,
            psi_change,
            eigenvalue,
        });
        if !new_energy.is_finite() {
            return Err(PolaronError::NumericalFailure(format!(
                "energy became non-finite at iteration {iteration}"
            )));
        }

        psi = new_psi;
        energy = new_energy;

        if energy_change <= opts.tol_energy && psi_change <= opts.tol_psi {
            return PekarState::assemble(psi, iteration);
        }

        let beta = opts.mixing;
        let mixed: Vec<f64> = rho_mix
            .values()
            .iter()
            .zip(new_rho.values())
            .map(|(old, new)| (1.0 - beta) * old + beta * new)
            .collect();
        rho_mix = RadialFunction::new(grid.clone(), mixed, Parity::Even)?;
    }

    let last = history.last().copied();
    Err(PolaronError::ConvergenceFailure {
        iterations: opts.max_iter,
        last_energy_change: last.map_or(f64::NAN, |r| r.energy_change),
        last_psi_change: last.map_or(f64::NAN, |r| r.psi_change),
        last: Box::new(PekarState::assemble(psi, opts.max_iter)?),
        history,
    })
}

/// L² norm of `(−Δ − 2Φ_ρ)ψ − λψ` with `λ = T − 2D`, evaluated with the same
/// three-point operator the solver uses on `u = rψ`.
pub fn el_residual_position(state: &PekarState) -> f64 {
    let grid = state.grid();
    let h = grid.spacing();
    let r = grid.nodes();
    let n = grid.len();
    let phi = coulomb_potential(&state.rho);
    let lambda = state.lagrange_multiplier();
    let u: Vec<f64> = r.iter().zip(state.psi.values()).map(|(r, v)| r * v).collect();
    let mut sum = 0.0;
    for i in 0..n - 1 {
        let left = if i == 0 { 0.0 } else { u[i - 1] };
        let lap = (left - 2.0 * u[i] + u[i + 1]) / (h * h);
        let res = -lap - 2.0 * phi.values()[i] * u[i] - lambda * u[i];
        sum += res * res;
    }
    (4.0 * PI * h * sum).sqrt()
}
