//! Normalized gradient flow in imaginary time, used as an independent
//! minimizer to cross-check the self-consistent solver.
//!
//! One step freezes `Φ_ρ` at the current density and takes a backward-Euler
//! step of `∂_t ψ = −(−Δ − 2Φ_ρ)ψ` followed by renormalization:
//! `ψ ← normalize((1 + τ(−Δ − 2Φ_ρ))⁻¹ ψ)`. No eigenproblem and no density
//! mixing are involved.

use std::sync::Arc;

use super::{initial_profile, PekarState, SolverOptions};
use crate::error::{PolaronError, Result};
use crate::radial::{coulomb_potential, integrate_3d, Parity, RadialFunction};
use crate::solver::tridiag::solve_shifted;

pub const DEFAULT_FLOW_STEP: f64 = 0.05;

/// Allowed energy increase per step before the flow is declared unstable.
const MONOTONICITY_SLACK: f64 = 1e-12;

const MAX_FLOW_STEPS: usize = 2_000_000;

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub state: PekarState,
    /// Energy after every step, starting with the initial profile.
    pub energies: Vec<f64>,
    /// Largest `|∫ρ − 1|` seen after renormalization.
    pub max_norm_drift: f64,
}

pub fn imaginary_time_oracle(opts: &SolverOptions, step: f64) -> Result<PekarState> {
    imaginary_time_flow(opts, step).map(|t| t.state)
}

/// Run the flow until the dissipation rate `(E_n − E_{n+1}) / τ` falls below
/// `opts.tol_energy`.
pub fn imaginary_time_flow(opts: &SolverOptions, step: f64) -> Result<FlowTrace> {
    opts.validate()?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(PolaronError::invalid(format!("flow step must be positive, got {step}")));
    }
    let grid = opts.grid()?;
    let n = grid.len();
    let h = grid.spacing();
    let r: Vec<f64> = grid.nodes().to_vec();

    let mut psi = initial_profile(&grid, opts.init)?;
    let mut state = PekarState::assemble(psi.clone(), 0)?;
    let mut energies = vec![state.energy];
    let mut max_norm_drift: f64 = 0.0;
    let off = -step / (h * h);

    for iteration in 1..=MAX_FLOW_STEPS {
        let phi = coulomb_potential(&state.rho);
        let diag: Vec<f64> = phi.values()[..n - 1]
            .iter()
            .map(|&p| 1.0 + step * (2.0 / (h * h) - 2.0 * p))
            .collect();
        let u: Vec<f64> = (0..n - 1).map(|i| r[i] * psi.values()[i]).collect();
        let u_next = solve_shifted(&diag, off, 0.0, &u)?;
        let mut values: Vec<f64> = (0..n - 1).map(|i| u_next[i] / r[i]).collect();
        values.push(0.0);
        let raw = RadialFunction::new(Arc::clone(&grid), values, Parity::Even)?;
        let next = PekarState::assemble(raw, iteration)?;
        let drift = (integrate_3d(&next.rho) - 1.0).abs();
        max_norm_drift = max_norm_drift.max(drift);

        let decrease = state.energy - next.energy;
        if decrease < -MONOTONICITY_SLACK {
            return Err(PolaronError::StepSizeFailure {
                step,
                iteration,
                increase: -decrease,
            });
        }
        energies.push(next.energy);
        psi = next.psi.clone();
        state = next;
        if decrease / step <= opts.tol_energy {
            return Ok(FlowTrace {
                state,
                energies,
                max_norm_drift,
            });
        }
    }
    Err(PolaronError::ConvergenceFailure {
        iterations: MAX_FLOW_STEPS,
        last_energy_change: energies.windows(2).last().map_or(f64::NAN, |w| (w[0] - w[1]).abs()),
        last_psi_change: f64::NAN,
        last: Box::new(state),
        history: Vec::new(),
    })
}
