use std::f64::consts::PI;

use crate::error::{PolaronError, Result};
use crate::radial::{build_grid, GaussLegendre, RadialGrid};

pub const DEFAULT_REDUCED_N: usize = 400;
pub const DEFAULT_ANGULAR_NODES: usize = 64;

/// `∬ d³k d³p F = 8π² ∫ k² dk ∫ p² dp ∫_{-1}^{1} dc F` for integrands that
/// depend only on `|p|`, `|k|` and the cosine `c` between them.
pub const ANGULAR_REDUCTION: f64 = 8.0 * PI * PI;

/// Settings for the angular-reduced double momentum integrals: a coarse
/// uniform grid for both radial variables and a Gauss–Legendre rule for the
/// cosine.
#[derive(Debug, Clone)]
pub struct AngularQuadrature {
    reduced_n: usize,
    angular: GaussLegendre,
}

impl Default for AngularQuadrature {
    fn default() -> Self {
        AngularQuadrature::new(DEFAULT_REDUCED_N, DEFAULT_ANGULAR_NODES).expect("valid defaults")
    }
}

/// Radial nodes for an outer variable (`p > 0`) and an inner one that also
/// carries the origin (`k_0 = 0` with weight `h/2`).
#[derive(Debug, Clone)]
pub(crate) struct ReducedNodes {
    pub p: Vec<f64>,
    pub wp: Vec<f64>,
    pub k: Vec<f64>,
    pub wk: Vec<f64>,
}

impl AngularQuadrature {
    pub fn new(reduced_n: usize, angular_nodes: usize) -> Result<Self> {
        if reduced_n < 2 || angular_nodes < 2 {
            return Err(PolaronError::invalid(format!(
                "angular quadrature needs >= 2 radial and angular nodes, got {reduced_n} and {angular_nodes}"
            )));
        }
        Ok(AngularQuadrature {
            reduced_n,
            angular: GaussLegendre::new(angular_nodes),
        })
    }

    pub fn reduced_n(&self) -> usize {
        self.reduced_n
    }

    pub fn angular(&self) -> &GaussLegendre {
        &self.angular
    }

    pub fn reduced_grid(&self, pmax: f64) -> Result<RadialGrid> {
        build_grid(self.reduced_n, pmax)
    }

    pub(crate) fn nodes(&self, pmax: f64) -> Result<ReducedNodes> {
        let grid = self.reduced_grid(pmax)?;
        let p = grid.nodes().to_vec();
        let wp = grid.weights().to_vec();
        let mut k = Vec::with_capacity(p.len() + 1);
        let mut wk = Vec::with_capacity(p.len() + 1);
        k.push(0.0);
        wk.push(grid.origin_weight());
        k.extend_from_slice(&p);
        wk.extend_from_slice(&wp);
        Ok(ReducedNodes { p, wp, k, wk })
    }
}

/// `|p + k|` for magnitudes `p`, `k` and cosine `c`.
#[inline]
pub(crate) fn shifted_norm(p: f64, k: f64, c: f64) -> f64 {
    (p * p + k * k + 2.0 * p * k * c).max(0.0).sqrt()
}
