use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use polaron_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(polaron_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn solve(opts: &PolaronSolverOptions) -> (PolaronStatus, *mut PolaronState) {
    let mut state = ptr::null_mut();
    let status = unsafe { polaron_solve(opts, &mut state) };
    (status, state)
}

fn small_options() -> PolaronSolverOptions {
    PolaronSolverOptions {
        n: 1200,
        ..polaron_solver_options_default()
    }
}

#[test]
fn solve_and_read_back() {
    let (status, state) = solve(&small_options());
    assert_eq!(status, PolaronStatus::Ok, "{}", last_error());
    assert!(last_error().is_empty());

    let mut e = PolaronEnergies::default();
    assert_eq!(unsafe { polaron_state_energies(state, &mut e) }, PolaronStatus::Ok);
    assert!((e.coulomb / (2.0 * e.kinetic) - 1.0).abs() < 1e-4);
    assert!((e.energy + 0.10851).abs() < 1e-4);
    assert!(e.residual < 1e-6 && e.iterations > 0);

    let n = unsafe { polaron_state_len(state) };
    assert_eq!(n, 1200);
    let mut r = vec![0.0; n];
    let mut psi = vec![0.0; n];
    assert_eq!(
        unsafe { polaron_state_radii(state, r.as_mut_ptr(), n) },
        PolaronStatus::Ok
    );
    assert_eq!(
        unsafe { polaron_state_psi(state, psi.as_mut_ptr(), n) },
        PolaronStatus::Ok
    );
    assert!((r[n - 1] - 30.0).abs() < 1e-12);
    assert!(psi[0] > psi[n / 2] && psi[n - 1] == 0.0);

    let mut short = vec![0.0; n - 1];
    assert_eq!(
        unsafe { polaron_state_psi(state, short.as_mut_ptr(), n - 1) },
        PolaronStatus::InvalidArgument
    );
    assert!(last_error().contains("buffer"));

    let mut coeff = 0.0;
    assert_eq!(
        unsafe { polaron_mass_coefficient(state, &mut coeff) },
        PolaronStatus::Ok
    );
    assert!((coeff - 0.011351).abs() < 1e-5);

    unsafe { polaron_state_free(state) };
}

#[test]
fn mass_bound_through_handles() {
    let (status, state) = solve(&small_options());
    assert_eq!(status, PolaronStatus::Ok);
    let mut profile = ptr::null_mut();
    assert_eq!(
        unsafe { polaron_profile_new(state, 2500, 2.5, &mut profile) },
        PolaronStatus::Ok,
        "{}",
        last_error()
    );
    let n = unsafe { polaron_profile_len(profile) };
    let mut psi_hat = vec![0.0; n];
    assert_eq!(
        unsafe { polaron_profile_psi_hat(profile, psi_hat.as_mut_ptr(), n) },
        PolaronStatus::Ok
    );
    assert!(psi_hat.iter().all(|&v| v > 0.0));

    let cutoff = PolaronCutoff {
        eps: 0.2,
        shape: POLARON_CUTOFF_BUMP,
        support_radius: 1.0,
    };
    let mut out = PolaronMassBound::default();
    assert_eq!(
        unsafe { polaron_mass_bound(profile, state, &cutoff, 200, 32, &mut out) },
        PolaronStatus::Ok,
        "{}",
        last_error()
    );
    assert!((out.identity_neg32 + 1.5).abs() < 1e-3);
    assert!((out.identity_3 - 3.0).abs() < 1e-2);
    assert!(out.f > 0.0 && out.f < 1e-3 && !out.f_nonpositive);
    assert!((out.m_lower - 0.5 / out.f).abs() < 1e-9 * out.m_lower);

    let bad = PolaronCutoff { shape: 9, ..cutoff };
    assert_eq!(
        unsafe { polaron_mass_bound(profile, state, &bad, 200, 32, &mut out) },
        PolaronStatus::InvalidArgument
    );
    unsafe {
        polaron_profile_free(profile);
        polaron_state_free(state);
    }
}

#[test]
fn error_codes() {
    let (status, state) = solve(&PolaronSolverOptions {
        n: 2,
        ..small_options()
    });
    assert_eq!(status, PolaronStatus::InvalidArgument);
    assert!(state.is_null());
    assert!(last_error().contains("n >= 4"));

    let (status, _) = solve(&PolaronSolverOptions {
        init: 7,
        ..small_options()
    });
    assert_eq!(status, PolaronStatus::InvalidArgument);

    let (status, state) = solve(&PolaronSolverOptions {
        max_iter: 2,
        ..small_options()
    });
    assert_eq!(status, PolaronStatus::ConvergenceFailure);
    assert!(state.is_null());

    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { polaron_solve(ptr::null(), &mut out) },
        PolaronStatus::NullPointer
    );
    assert_eq!(
        unsafe { polaron_solve(&small_options(), ptr::null_mut()) },
        PolaronStatus::NullPointer
    );
    assert_eq!(unsafe { polaron_state_len(ptr::null()) }, 0);
    unsafe {
        polaron_state_free(ptr::null_mut());
        polaron_profile_free(ptr::null_mut());
    }

    // momentum grid reaching the noise floor of psi_hat
    let (status, state) = solve(&small_options());
    assert_eq!(status, PolaronStatus::Ok);
    let mut profile = ptr::null_mut();
    assert_eq!(
        unsafe { polaron_profile_new(state, 1000, 10.0, &mut profile) },
        PolaronStatus::DomainFailure
    );
    assert!(profile.is_null());
    unsafe { polaron_state_free(state) };
}

#[test]
fn generated_header() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/polaron.h");
    let text = std::fs::read_to_string(&header).expect("header generated by build.rs");
    for name in [
        "typedef struct PolaronState PolaronState",
        "typedef struct PolaronProfile PolaronProfile",
        "POLARON_STATUS_OK = 0",
        "POLARON_STATUS_DOMAIN_FAILURE",
        "POLARON_CUTOFF_BUMP",
        "polaron_solve(",
        "polaron_state_free(",
        "polaron_mass_bound(",
        "polaron_last_error_message(",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }

    // the header must parse as C when a compiler is around
    if let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
