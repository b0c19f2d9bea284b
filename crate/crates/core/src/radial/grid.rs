use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{PolaronError, Result};

/// Uniform grid `r_i = i * rmax / n`, `i = 1..=n`, with composite trapezoid
/// weights for `∫_0^rmax dr`.
///
/// The origin is not a node. Its trapezoid weight `h/2` is kept separately in
/// [`RadialGrid::origin_weight`]: integrands carrying an `r²` Jacobian vanish
/// there, the rest supply an extrapolated origin value through
/// [`RadialGrid::integrate_with_origin`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    n: usize,
    rmax: f64,
    spacing: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Build a uniform grid of `n` nodes on `(0, rmax]`.
pub fn build_grid(n: usize, rmax: f64) -> Result<RadialGrid> {
    if n < 2 {
        return Err(PolaronError::invalid(format!("grid needs n >= 2 nodes, got {n}")));
    }
    if !(rmax > 0.0 && rmax.is_finite()) {
        return Err(PolaronError::invalid(format!(
            "grid extent must be positive, got {rmax}"
        )));
    }
    let spacing = rmax / n as f64;
    let nodes: Vec<f64> = (1..=n).map(|i| i as f64 * rmax / n as f64).collect();
    let mut weights = vec![spacing; n];
    weights[n - 1] = 0.5 * spacing;
    Ok(RadialGrid {
        n,
        rmax,
        spacing,
        nodes,
        weights,
    })
}

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn rmax(&self) -> f64 {
        self.rmax
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Trapezoid weight of the (excluded) node at `r = 0`.
    pub fn origin_weight(&self) -> f64 {
        0.5 * self.spacing
    }

    /// `Σ w_i g_i` plus the origin term `h/2 · g(0)`, with `g(0)` the
    /// quadratic extrapolation from the three smallest nodes. For 1D
    /// integrands that do not vanish at the origin.
    pub fn integrate_with_origin(&self, integrand: &[f64]) -> f64 {
        debug_assert_eq!(integrand.len(), self.n);
        let interior: f64 = self.weights.iter().zip(integrand).map(|(w, g)| w * g).sum();
        interior + self.origin_weight() * quadratic_origin(integrand)
    }

    /// `Σ w_i g_i` with no origin term.
    pub fn integrate(&self, integrand: &[f64]) -> f64 {
        debug_assert_eq!(integrand.len(), self.n);
        self.weights.iter().zip(integrand).map(|(w, g)| w * g).sum()
    }

    pub(crate) fn same_as(&self, other: &RadialGrid) -> bool {
        self.n == other.n && self.rmax.to_bits() == other.rmax.to_bits()
    }
}

/// Value at zero of the quadratic through the first three samples of a
/// uniform grid starting at `h`: `3 f_1 − 3 f_2 + f_3`.
pub(crate) fn quadratic_origin(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => 2.0 * values[0] - values[1],
        _ => 3.0 * values[0] - 3.0 * values[1] + values[2],
    }
}

/// Behaviour of the 3D extension of a radial profile near the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

/// Samples `f(r_i)` of a rotation-invariant function on a [`RadialGrid`].
#[derive(Debug, Clone)]
pub struct RadialFunction {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    parity: Parity,
}

impl RadialFunction {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PolaronError::invalid(format!(
                "radial function has {} samples but grid has {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(PolaronError::NumericalFailure(format!(
                "non-finite sample {} at node {i}",
                values[i]
            )));
        }
        Ok(RadialFunction { grid, values, parity })
    }

    /// Sample a closure on every node.
    pub fn from_fn(grid: Arc<RadialGrid>, parity: Parity, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::new(grid, values, parity)
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pointwise map, keeping grid and parity.
    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Result<RadialFunction> {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &v)| f(r, v))
            .collect();
        RadialFunction::new(self.grid.clone(), values, self.parity)
    }

    /// Pointwise product on a shared grid. Parity multiplies like signs.
    pub fn product(&self, other: &RadialFunction) -> Result<RadialFunction> {
        self.check_same_grid(other)?;
        let parity = if self.parity == other.parity {
            Parity::Even
        } else {
            Parity::Odd
        };
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        RadialFunction::new(self.grid.clone(), values, parity)
    }

    /// Value "at 0": zero for odd profiles, otherwise quadratic
    /// extrapolation from the three smallest nodes.
    pub fn extrapolate_origin(&self) -> f64 {
        match self.parity {
            Parity::Odd => 0.0,
            Parity::Even => quadratic_origin(&self.values),
        }
    }

    pub(crate) fn check_same_grid(&self, other: &RadialFunction) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_as(&other.grid) {
            Ok(())
        } else {
            Err(PolaronError::invalid(format!(
                "grid mismatch: ({}, {}) vs ({}, {})",
                self.grid.len(),
                self.grid.rmax(),
                other.grid.len(),
                other.grid.rmax()
            )))
        }
    }
}

/// `∫_{ℝ³} f dx = 4π Σ w_i r_i² f(r_i)`.
pub fn integrate_3d(f: &RadialFunction) -> f64 {
    let grid = f.grid();
    let sum: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(f.values())
        .map(|((r, w), v)| w * r * r * v)
        .sum();
    4.0 * PI * sum
}

/// Second-order finite-difference `df/dr`: central in the interior,
/// one-sided three-point stencils at both ends.
pub fn radial_derivative(f: &RadialFunction) -> Result<RadialFunction> {
    let n = f.len();
    if n < 4 {
        return Err(PolaronError::invalid(format!(
            "radial derivative needs at least 4 nodes, got {n}"
        )));
    }
    let h = f.grid().spacing();
    let v = f.values();
    let mut d = vec![0.0; n];
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    for i in 1..n - 1 {
        d[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
    }
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
    RadialFunction::new(f.grid().clone(), d, f.parity().flip())
}
