//! Strong-coupling limit of the variational inverse-mass bound.
//!
//! The trial direction is `t(p) = ∇ψ̂(p)/ψ̂(p) · χ(εp) = p h(p)`. As the
//! coupling grows the right side of the bound tends to
//! `f(ε) = 1 + (Q1 − Q2)/3 + 4R/3`, which vanishes as `ε → 0`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{PolaronError, Result};
use crate::momentum::{shifted_norm, AngularQuadrature, MomentumProfile};
use crate::parallel;
use crate::radial::{integrate_3d, Parity, RadialFunction};
use crate::solver::PekarState;

pub const DEFAULT_SUPPORT_RADIUS: f64 = 1.0;
pub const DEFAULT_EPS_LIST: [f64; 4] = [0.5, 0.2, 0.1, 0.05];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CutoffShape {
    /// `exp(1 − 1/(1 − (s/s*)²))` on `|s| < s*`
    Bump,
    /// `exp(−(s/s*)²)`, not compactly supported
    Gaussian,
    /// `χ ≡ 1`
    One,
}

impl FromStr for CutoffShape {
    type Err = PolaronError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bump" => Ok(CutoffShape::Bump),
            "gaussian" => Ok(CutoffShape::Gaussian),
            "one" => Ok(CutoffShape::One),
            other => Err(PolaronError::invalid(format!(
                "unknown cutoff shape {other:?} (expected bump, gaussian or one)"
            ))),
        }
    }
}

impl fmt::Display for CutoffShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutoffShape::Bump => "bump",
            CutoffShape::Gaussian => "gaussian",
            CutoffShape::One => "one",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffSpec {
    pub eps: f64,
    pub shape: CutoffShape,
    pub support_radius: f64,
}

impl CutoffSpec {
    pub fn new(eps: f64, shape: CutoffShape, support_radius: f64) -> Result<Self> {
        let spec = CutoffSpec {
            eps,
            shape,
            support_radius,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bump(eps: f64) -> Result<Self> {
        Self::new(eps, CutoffShape::Bump, DEFAULT_SUPPORT_RADIUS)
    }

    /// The `ε = 0` endpoint.
    pub fn one() -> Self {
        CutoffSpec {
            eps: 0.0,
            shape: CutoffShape::One,
            support_radius: DEFAULT_SUPPORT_RADIUS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.support_radius > 0.0 && self.support_radius.is_finite()) {
            return Err(PolaronError::invalid(format!(
                "cutoff support radius must be positive, got {}",
                self.support_radius
            )));
        }
        if self.shape != CutoffShape::One && !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(PolaronError::invalid(format!(
                "cutoff eps must be positive, got {}",
                self.eps
            )));
        }
        Ok(())
    }

    /// `χ(s)`
    pub fn chi(&self, s: f64) -> f64 {
        let x = s / self.support_radius;
        match self.shape {
            CutoffShape::One => 1.0,
            CutoffShape::Gaussian => (-x * x).exp(),
            CutoffShape::Bump => {
                let x2 = x * x;
                if x2 >= 1.0 {
                    0.0
                } else {
                    (1.0 - 1.0 / (1.0 - x2)).exp()
                }
            }
        }
    }

    /// `χ(εp)`
    pub fn chi_at(&self, p: f64) -> f64 {
        match self.shape {
            CutoffShape::One => 1.0,
            _ => self.chi(self.eps * p),
        }
    }

    /// Momentum beyond which `χ(εp)` vanishes identically.
    pub fn support_limit(&self) -> f64 {
        match self.shape {
            CutoffShape::Bump => self.support_radius / self.eps,
            _ => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassBoundReport {
    pub eps: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "Q1")]
    pub q1: f64,
    #[serde(rename = "Q2")]
    pub q2: f64,
    pub f: f64,
    /// `1/(2f)`, or `+∞` when `f ≤ 0`.
    pub m_lower: f64,
    pub f_nonpositive: bool,
    pub identity_neg32: f64,
    pub identity_3: f64,
    pub mass_coeff: f64,
}

/// `h(p) = ψ̂'(p) / (p ψ̂(p)) · χ(εp)` on the momentum grid, so that
/// `t(p) = p h(p)`. The quotient is only formed where `χ(εp) ≠ 0`.
pub fn trial_profile(mp: &MomentumProfile, cut: &CutoffSpec) -> Result<RadialFunction> {
    cut.validate()?;
    let grid = mp.grid();
    let mut values = Vec::with_capacity(grid.len());
    for ((&p, &psi), &dpsi) in grid.nodes().iter().zip(mp.psi_hat.values()).zip(mp.dpsi_hat.values()) {
        let chi = cut.chi_at(p);
        if chi == 0.0 {
            values.push(0.0);
            continue;
        }
        if psi <= 0.0 {
            return Err(PolaronError::DomainFailure(format!(
                "psi_hat({p}) = {psi:e} inside the cutoff support"
            )));
        }
        values.push(dpsi / (p * psi) * chi);
    }
    RadialFunction::new(grid.clone(), values, Parity::Even)
}

/// Index one past the last grid node inside the cutoff support.
fn support_end(nodes: &[f64], cut: &CutoffSpec) -> usize {
    let limit = cut.support_limit();
    nodes.partition_point(|&p| p < limit)
}

/// `4π Σ w_i g(i, p_i, χ(εp_i))` over the momentum grid.
fn radial_term(
    mp: &MomentumProfile,
    cut: &CutoffSpec,
    restrict: bool,
    integrand: impl Fn(usize, f64, f64) -> f64,
) -> f64 {
    let grid = mp.grid();
    let nodes = grid.nodes();
    let end = if restrict { support_end(nodes, cut) } else { nodes.len() };
    let sum: f64 = (0..end)
        .map(|i| grid.weights()[i] * integrand(i, nodes[i], cut.chi_at(nodes[i])))
        .sum();
    4.0 * PI * sum
}

fn pairing_impl(mp: &MomentumProfile, cut: &CutoffSpec, restrict: bool) -> f64 {
    let psi = mp.psi_hat.values();
    let dpsi = mp.dpsi_hat.values();
    radial_term(mp, cut, restrict, |i, p, chi| p * p * p * chi * psi[i] * dpsi[i])
}

/// `R(ε) = ∫ dp ψ̂² p·t = 4π ∫ p³ χ(εp) ψ̂ ψ̂' dp`
pub fn pairing_term(mp: &MomentumProfile, cut: &CutoffSpec) -> Result<f64> {
    cut.validate()?;
    Ok(pairing_impl(mp, cut, true))
}

fn kinetic_impl(mp: &MomentumProfile, cut: &CutoffSpec, restrict: bool) -> f64 {
    let dpsi = mp.dpsi_hat.values();
    let mu = mp.mu;
    radial_term(mp, cut, restrict, |i, p, chi| {
        p * p * chi * chi * dpsi[i] * dpsi[i] * (p * p + mu)
    })
}

/// `Q1(ε) = 4π ∫ p² χ(εp)² ψ̂'² (p² + μ) dp`
pub fn kinetic_term(mp: &MomentumProfile, cut: &CutoffSpec) -> Result<f64> {
    cut.validate()?;
    Ok(kinetic_impl(mp, cut, true))
}

fn potential_impl(mp: &MomentumProfile, cut: &CutoffSpec, quad: &AngularQuadrature, restrict: bool) -> Result<f64> {
    let nodes = quad.nodes(mp.pmax())?;
    let gl = quad.angular();
    let end = if restrict {
        support_end(&nodes.p, cut)
    } else {
        nodes.p.len()
    };
    let rho_k: Vec<f64> = nodes.k.iter().map(|&k| mp.rho_hat_at(k)).collect();
    let rows = parallel::map_indexed(end, |i| {
        let p = nodes.p[i];
        let outer = cut.chi_at(p) * mp.dpsi_hat_at(p);
        if outer == 0.0 {
            return 0.0;
        }
        let mut inner = 0.0;
        for ((&k, &wk), &rk) in nodes.k.iter().zip(&nodes.wk).zip(&rho_k) {
            let c_int = gl.integrate(|c| {
                let q = shifted_norm(p, k, c);
                if q == 0.0 {
                    return 0.0;
                }
                cut.chi_at(q) * mp.dpsi_hat_at(q) * (p + k * c) / q
            });
            inner += wk * rk * c_int;
        }
        nodes.wp[i] * p * p * outer * inner
    });
    // 8π² · (√2/π) · k²(φ/k) = 8 ρ̂(k)
    Ok(8.0 * rows.iter().sum::<f64>())
}

/// `Q2(ε) = (√2/π) ∬ dk dp (φ(k)/|k|) χ(ε|p+k|) ∇ψ̂(p+k) · χ(εp) ∇ψ̂(p)`
pub fn potential_term(mp: &MomentumProfile, cut: &CutoffSpec, quad: &AngularQuadrature) -> Result<f64> {
    cut.validate()?;
    potential_impl(mp, cut, quad, true)
}

fn assemble(
    eps: f64,
    r: f64,
    q1: f64,
    q2: f64,
    identity_neg32: f64,
    identity_3: f64,
    mass_coeff: f64,
) -> Result<MassBoundReport> {
    let f = 1.0 + (q1 - q2) / 3.0 + 4.0 * r / 3.0;
    let f_nonpositive = f <= 0.0;
    let m_lower = if f_nonpositive { f64::INFINITY } else { 1.0 / (2.0 * f) };
    let report = MassBoundReport {
        eps,
        r,
        q1,
        q2,
        f,
        m_lower,
        f_nonpositive,
        identity_neg32,
        identity_3,
        mass_coeff,
    };
    let finite = [r, q1, q2, f, identity_neg32, identity_3, mass_coeff];
    if finite.iter().any(|v| !v.is_finite()) {
        return Err(PolaronError::NumericalFailure(format!(
            "non-finite mass-bound term: {report:?}"
        )));
    }
    Ok(report)
}

fn terms(mp: &MomentumProfile, cut: &CutoffSpec, quad: &AngularQuadrature) -> Result<(f64, f64, f64)> {
    Ok((
        pairing_term(mp, cut)?,
        kinetic_term(mp, cut)?,
        potential_term(mp, cut, quad)?,
    ))
}

/// Assemble `f(ε)` and `m_lower` for one cutoff, together with the `χ ≡ 1`
/// identity values and the mass coefficient of `state`.
pub fn bound_rhs(
    mp: &MomentumProfile,
    cut: &CutoffSpec,
    quad: &AngularQuadrature,
    state: &PekarState,
) -> Result<MassBoundReport> {
    let (r1, q1_1, q2_1) = terms(mp, &CutoffSpec::one(), quad)?;
    let (r, q1, q2) = if cut.shape == CutoffShape::One {
        (r1, q1_1, q2_1)
    } else {
        terms(mp, cut, quad)?
    };
    assemble(cut.eps, r, q1, q2, r1, q1_1 - q2_1, mass_coefficient(state))
}

/// Reports for every `ε` in `eps_list` followed by the `χ ≡ 1` endpoint
/// (labelled `eps = 0`).
pub fn mass_bound_sweep(
    mp: &MomentumProfile,
    shape: CutoffShape,
    support_radius: f64,
    eps_list: &[f64],
    quad: &AngularQuadrature,
    state: &PekarState,
) -> Result<Vec<MassBoundReport>> {
    let coeff = mass_coefficient(state);
    let (r1, q1_1, q2_1) = terms(mp, &CutoffSpec::one(), quad)?;
    let mut out = Vec::with_capacity(eps_list.len() + 1);
    for &eps in eps_list {
        let cut = CutoffSpec::new(eps, shape, support_radius)?;
        let (r, q1, q2) = terms(mp, &cut, quad)?;
        out.push(assemble(eps, r, q1, q2, r1, q1_1 - q2_1, coeff)?);
    }
    out.push(assemble(0.0, r1, q1_1, q2_1, r1, q1_1 - q2_1, coeff)?);
    Ok(out)
}

/// `(8π/3) ∫ |ψ|⁴`
pub fn mass_coefficient(state: &PekarState) -> f64 {
    let psi2 = state.psi.product(&state.psi).expect("same grid");
    let psi4 = psi2.product(&psi2).expect("same grid");
    8.0 * PI / 3.0 * integrate_3d(&psi4)
}

/// Leading large-coupling predictions `(α² e^P, α⁴ · coeff)`.
pub fn alpha_scaling(state: &PekarState, coeff: f64, alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(PolaronError::invalid(format!("alpha must be positive, got {alpha}")));
    }
    Ok((alpha * alpha * state.energy, alpha.powi(4) * coeff))
}

/// `4π ∫ r⁴ ψ'² dr + μ · 4π ∫ r⁴ ψ² dr`, the position-space value of
/// `Q1` at `χ ≡ 1`.
pub fn kinetic_term_position_oracle(state: &PekarState) -> Result<f64> {
    let dpsi = crate::radial::radial_derivative(&state.psi)?;
    let grad = dpsi.map(|r, v| r * r * v * v)?;
    let moment = state.psi.map(|r, v| r * r * v * v)?;
    Ok(integrate_3d(&grad) + state.mu * integrate_3d(&moment))
}

/// `2 D(ρ, r²ρ)`, the position-space value of `Q2` at `χ ≡ 1`.
pub fn potential_term_position_oracle(state: &PekarState) -> Result<f64> {
    let r2rho = state.rho.map(|r, v| r * r * v)?;
    Ok(2.0 * crate::radial::coulomb_bilinear(&state.rho, &r2rho)?)
}
