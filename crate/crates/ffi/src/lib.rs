//! C ABI for `polaron-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free`. Every fallible call returns a
//! [`PolaronStatus`]; on failure a description is available from
//! [`polaron_last_error_message`] on the same thread. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use polaron_core::mass::{bound_rhs, mass_coefficient, CutoffShape, CutoffSpec};
use polaron_core::momentum::{momentum_profile, AngularQuadrature, MomentumProfile};
use polaron_core::radial::build_grid;
use polaron_core::solver::{solve_pekar, InitialProfile, PekarState, SolverOptions};
use polaron_core::PolaronError;

pub const POLARON_INIT_HYDROGENIC: u32 = 0;
pub const POLARON_INIT_GAUSSIAN: u32 = 1;

pub const POLARON_CUTOFF_BUMP: u32 = 0;
pub const POLARON_CUTOFF_GAUSSIAN: u32 = 1;
pub const POLARON_CUTOFF_ONE: u32 = 2;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolaronStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    ConvergenceFailure = 3,
    NumericalFailure = 4,
    DomainFailure = 5,
    StepSizeFailure = 6,
    Panic = 7,
}

/// Ground state of the Pekar functional on a radial grid.
pub struct PolaronState {
    inner: PekarState,
}

/// Momentum-space profile of a [`PolaronState`].
pub struct PolaronProfile {
    inner: MomentumProfile,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PolaronSolverOptions {
    pub n: usize,
    pub rmax: f64,
    /// `POLARON_INIT_*`
    pub init: u32,
    pub mixing: f64,
    pub tol_energy: f64,
    pub tol_psi: f64,
    pub max_iter: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolaronEnergies {
    pub kinetic: f64,
    pub coulomb: f64,
    pub energy: f64,
    pub mu: f64,
    pub residual: f64,
    pub iterations: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PolaronCutoff {
    pub eps: f64,
    /// `POLARON_CUTOFF_*`
    pub shape: u32,
    pub support_radius: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PolaronMassBound {
    pub eps: f64,
    pub r: f64,
    pub q1: f64,
    pub q2: f64,
    pub f: f64,
    /// `+inf` when `f <= 0`.
    pub m_lower: f64,
    pub f_nonpositive: bool,
    pub identity_neg32: f64,
    pub identity_3: f64,
    pub mass_coeff: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

type Failure = (PolaronStatus, String);

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn from_core(err: PolaronError) -> Failure {
    let status = match &err {
        PolaronError::InvalidArgument(_) => PolaronStatus::InvalidArgument,
        PolaronError::ConvergenceFailure { .. } => PolaronStatus::ConvergenceFailure,
        PolaronError::NumericalFailure(_) => PolaronStatus::NumericalFailure,
        PolaronError::StepSizeFailure { .. } => PolaronStatus::StepSizeFailure,
        PolaronError::DomainFailure(_) => PolaronStatus::DomainFailure,
    };
    (status, err.to_string())
}

fn invalid(msg: &str) -> Failure {
    (PolaronStatus::InvalidArgument, msg.to_string())
}

fn null(name: &str) -> Failure {
    (PolaronStatus::NullPointer, format!("{name} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PolaronStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            PolaronStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside polaron");
            PolaronStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(name))
}

unsafe fn copy_out(values: &[f64], buf: *mut f64, len: usize) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("buffer"));
    }
    if len != values.len() {
        return Err(invalid(&format!("buffer holds {len} values, need {}", values.len())));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, len);
    Ok(())
}

/// Description of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn polaron_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn polaron_solver_options_default() -> PolaronSolverOptions {
    let d = SolverOptions::default();
    PolaronSolverOptions {
        n: d.n,
        rmax: d.rmax,
        init: POLARON_INIT_HYDROGENIC,
        mixing: d.mixing,
        tol_energy: d.tol_energy,
        tol_psi: d.tol_psi,
        max_iter: d.max_iter,
    }
}

/// Solve for the Pekar minimizer. On success `*out` receives a new handle.
///
/// # Safety
/// `opts` must point to a valid options struct and `out` to writable storage.
#[no_mangle]
pub unsafe extern "C" fn polaron_solve(
    opts: *const PolaronSolverOptions,
    out: *mut *mut PolaronState,
) -> PolaronStatus {
    guard(|| {
        let o = deref(opts, "opts")?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let init = match o.init {
            POLARON_INIT_HYDROGENIC => InitialProfile::Hydrogenic,
            POLARON_INIT_GAUSSIAN => InitialProfile::Gaussian,
            other => return Err(invalid(&format!("unknown initial profile {other}"))),
        };
        let opts = SolverOptions {
            n: o.n,
            rmax: o.rmax,
            init,
            mixing: o.mixing,
            tol_energy: o.tol_energy,
            tol_psi: o.tol_psi,
            max_iter: o.max_iter,
        };
        let state = solve_pekar(&opts).map_err(from_core)?;
        *out = Box::into_raw(Box::new(PolaronState { inner: state }));
        Ok(())
    })
}

/// # Safety
/// `state` must be null or a handle from [`polaron_solve`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polaron_state_free(state: *mut PolaronState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn polaron_state_energies(
    state: *const PolaronState,
    out: *mut PolaronEnergies,
) -> PolaronStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = PolaronEnergies {
            kinetic: s.kinetic,
            coulomb: s.coulomb,
            energy: s.energy,
            mu: s.mu,
            residual: s.residual,
            iterations: s.iterations,
        };
        Ok(())
    })
}

/// Number of radial nodes, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polaron_state_len(state: *const PolaronState) -> usize {
    state.as_ref().map_or(0, |s| s.inner.psi.len())
}

/// Copy the radial nodes into `buf`, which must hold exactly
/// [`polaron_state_len`] values.
///
/// # Safety
/// `state` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn polaron_state_radii(state: *const PolaronState, buf: *mut f64, len: usize) -> PolaronStatus {
    guard(|| copy_out(deref(state, "state")?.inner.grid().nodes(), buf, len))
}

/// Copy `ψ` at the radial nodes into `buf`.
///
/// # Safety
/// `state` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn polaron_state_psi(state: *const PolaronState, buf: *mut f64, len: usize) -> PolaronStatus {
    guard(|| copy_out(deref(state, "state")?.inner.psi.values(), buf, len))
}

/// `(8π/3) ∫ ψ⁴`
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn polaron_mass_coefficient(state: *const PolaronState, out: *mut f64) -> PolaronStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = mass_coefficient(s);
        Ok(())
    })
}

/// Transform `state` onto `n` momentum nodes on `(0, pmax]`.
///
/// # Safety
/// `state` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn polaron_profile_new(
    state: *const PolaronState,
    n: usize,
    pmax: f64,
    out: *mut *mut PolaronProfile,
) -> PolaronStatus {
    guard(|| {
        let s = &deref(state, "state")?.inner;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let pgrid = Arc::new(build_grid(n, pmax).map_err(from_core)?);
        let mp = momentum_profile(s, &pgrid).map_err(from_core)?;
        *out = Box::into_raw(Box::new(PolaronProfile { inner: mp }));
        Ok(())
    })
}

/// # Safety
/// `profile` must be null or a handle from [`polaron_profile_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn polaron_profile_free(profile: *mut PolaronProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// # Safety
/// `profile` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn polaron_profile_len(profile: *const PolaronProfile) -> usize {
    profile.as_ref().map_or(0, |p| p.inner.psi_hat.len())
}

/// Copy `ψ̂` at the momentum nodes into `buf`.
///
/// # Safety
/// `profile` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn polaron_profile_psi_hat(
    profile: *const PolaronProfile,
    buf: *mut f64,
    len: usize,
) -> PolaronStatus {
    guard(|| copy_out(deref(profile, "profile")?.inner.psi_hat.values(), buf, len))
}

/// Evaluate the inverse-mass bound for one cutoff. `reduced_n` and
/// `angular_nodes` set the double-integral quadrature.
///
/// # Safety
/// `profile` and `state` must be live handles (the profile built from that
/// state), `cutoff` readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn polaron_mass_bound(
    profile: *const PolaronProfile,
    state: *const PolaronState,
    cutoff: *const PolaronCutoff,
    reduced_n: usize,
    angular_nodes: usize,
    out: *mut PolaronMassBound,
) -> PolaronStatus {
    guard(|| {
        let mp = &deref(profile, "profile")?.inner;
        let s = &deref(state, "state")?.inner;
        let c = deref(cutoff, "cutoff")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let shape = match c.shape {
            POLARON_CUTOFF_BUMP => CutoffShape::Bump,
            POLARON_CUTOFF_GAUSSIAN => CutoffShape::Gaussian,
            POLARON_CUTOFF_ONE => CutoffShape::One,
            other => return Err(invalid(&format!("unknown cutoff shape {other}"))),
        };
        let cut = CutoffSpec::new(c.eps, shape, c.support_radius).map_err(from_core)?;
        let quad = AngularQuadrature::new(reduced_n, angular_nodes).map_err(from_core)?;
        let r = bound_rhs(mp, &cut, &quad, s).map_err(from_core)?;
        *out = PolaronMassBound {
            eps: r.eps,
            r: r.r,
            q1: r.q1,
            q2: r.q2,
            f: r.f,
            m_lower: r.m_lower,
            f_nonpositive: r.f_nonpositive,
            identity_neg32: r.identity_neg32,
            identity_3: r.identity_3,
            mass_coeff: r.mass_coeff,
        };
        Ok(())
    })
}
