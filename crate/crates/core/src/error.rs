use thiserror::Error;

use crate::solver::{IterationRecord, PekarState};

pub type Result<T, E = PolaronError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum PolaronError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The self-consistent loop hit `max_iter`. Carries the last iterate
    /// and the full per-iteration history so callers can dump it.
    #[error("no convergence after {iterations} iterations (last energy change {last_energy_change:e}, last psi change {last_psi_change:e})")]
    ConvergenceFailure {
        iterations: usize,
        last_energy_change: f64,
        last_psi_change: f64,
        last: Box<PekarState>,
        history: Vec<IterationRecord>,
    },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("energy increased by {increase:e} at flow step {iteration} (step size {step})")]
    StepSizeFailure { step: f64, iteration: usize, increase: f64 },

    #[error("domain failure: {0}")]
    DomainFailure(String),
}

impl PolaronError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        PolaronError::InvalidArgument(msg.into())
    }
}
