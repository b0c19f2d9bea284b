//! Batch front end: configuration, the `solve`, `verify` and `massbound`
//! commands, and their artifacts.
//!
//! Every artifact embeds the resolved configuration, its SHA-256 and a
//! SHA-256 of the artifact's own payload. CSV numbers are written with 17
//! significant digits. Nothing time- or host-dependent is written, so equal
//! configurations give byte-identical files.

mod config;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::PolaronError;
use crate::mass::{
    kinetic_term, kinetic_term_position_oracle, mass_bound_sweep, mass_coefficient, pairing_term, potential_term,
    potential_term_position_oracle, CutoffSpec, MassBoundReport,
};
use crate::momentum::{
    el_residual_momentum, lemma1_cross, lemma1_cross_unit_g, lemma1_density_expectation, lemma1_number_expectation,
    momentum_profile, MomentumProfile, RadialTestFunction,
};
use crate::radial::{build_grid, coulomb_potential};
use crate::solver::{imaginary_time_oracle, solve_pekar, IterationRecord, PekarState};

pub use config::{sha256_hex, ConfigError, RunConfig, KEYS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

pub const STATE_FILE: &str = "pekar_state.json";
pub const PROFILES_FILE: &str = "profiles.csv";
pub const HISTORY_FILE: &str = "residual_history.csv";
pub const VERIFY_FILE: &str = "verify.csv";
pub const MASSBOUND_FILE: &str = "massbound.csv";

#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Numerical(PolaronError),
    #[error("{failed} of {total} verification checks failed")]
    Verification { failed: usize, total: usize },
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) | CommandError::Io { .. } => EXIT_CONFIG,
            CommandError::Numerical(PolaronError::InvalidArgument(_)) => EXIT_CONFIG,
            CommandError::Numerical(_) => EXIT_NUMERICAL,
            CommandError::Verification { .. } => EXIT_VERIFY,
        }
    }
}

impl From<PolaronError> for CommandError {
    fn from(e: PolaronError) -> Self {
        CommandError::Numerical(e)
    }
}

/// Files written by a command and a short human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct CommandOutput {
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

/// `{:.16e}` for finite values; `inf`, `-inf` and `nan` otherwise.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CommandError> {
    fs::write(path, contents).map_err(|source| CommandError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn prepare_dir(dir: &Path) -> Result<(), CommandError> {
    fs::create_dir_all(dir).map_err(|source| CommandError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Write a CSV artifact: `#` header lines with the config and hashes, then
/// `body` verbatim.
fn write_csv(path: &Path, title: &str, cfg: &RunConfig, notes: &[String], body: &str) -> Result<(), CommandError> {
    let mut out = String::new();
    writeln!(out, "# polaron {title}").unwrap();
    writeln!(out, "# config {}", cfg.canonical_json()).unwrap();
    writeln!(out, "# config_sha256 {}", cfg.sha256()).unwrap();
    writeln!(out, "# content_sha256 {}", sha256_hex(body.as_bytes())).unwrap();
    for note in notes {
        writeln!(out, "# {note}").unwrap();
    }
    out.push_str(body);
    write_file(path, &out)
}

fn csv_row(out: &mut String, cols: &[f64]) {
    let line: Vec<String> = cols.iter().map(|&x| fmt_f64(x)).collect();
    out.push_str(&line.join(","));
    out.push('\n');
}

fn history_csv(history: &[IterationRecord]) -> String {
    let mut body = String::from("iteration,energy,energy_change,psi_change,eigenvalue\n");
    for rec in history {
        write!(body, "{},", rec.iteration).unwrap();
        csv_row(
            &mut body,
            &[rec.energy, rec.energy_change, rec.psi_change, rec.eigenvalue],
        );
    }
    body
}

/// Run the self-consistent solver; on convergence failure dump the
/// iteration history before reporting.
fn run_solver(cfg: &RunConfig, out: &Path, written: &mut Vec<PathBuf>) -> Result<PekarState, CommandError> {
    match solve_pekar(&cfg.solver_options()) {
        Ok(state) => Ok(state),
        Err(err @ PolaronError::ConvergenceFailure { .. }) => {
            if let PolaronError::ConvergenceFailure { history, .. } = &err {
                let path = out.join(HISTORY_FILE);
                write_csv(
                    &path,
                    "residual history",
                    cfg,
                    &[err.to_string()],
                    &history_csv(history),
                )?;
                written.push(path);
            }
            Err(err.into())
        }
        Err(err) => Err(err.into()),
    }
}

fn profile(cfg: &RunConfig, state: &PekarState) -> Result<MomentumProfile, PolaronError> {
    let pgrid = Arc::new(build_grid(cfg.momentum_n, cfg.momentum_pmax)?);
    momentum_profile(state, &pgrid)
}

fn with_content_hash(mut doc: Value) -> Value {
    let hash = sha256_hex(serde_json::to_string(&doc).expect("serializable").as_bytes());
    doc.as_object_mut()
        .expect("object")
        .insert("content_sha256".into(), Value::from(hash));
    doc
}

/// `polaron solve`: `pekar_state.json` and `profiles.csv`.
pub fn cmd_solve(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CommandError> {
    prepare_dir(out)?;
    let mut files = Vec::new();
    let state = run_solver(cfg, out, &mut files)?;
    let mp = profile(cfg, &state)?;
    let momentum_residual = el_residual_momentum(&mp, &cfg.quadrature())?;
    let coeff = mass_coefficient(&state);
    let grid = state.grid();

    let doc = json!({
        "schema_version": 1,
        "kind": "pekar_state",
        "config": cfg.to_flat_json(),
        "config_sha256": cfg.sha256(),
        "energies": {
            "T": state.kinetic,
            "D": state.coulomb,
            "eP": state.energy,
            "mu": state.mu,
            "lambda": state.lagrange_multiplier(),
        },
        "iterations": state.iterations,
        "residuals": {
            "position": state.residual,
            "momentum": momentum_residual,
        },
        "grid": { "n": grid.len(), "rmax": grid.rmax(), "spacing": grid.spacing() },
        "momentum_grid": { "n": mp.grid().len(), "pmax": mp.pmax(), "spacing": mp.grid().spacing() },
        "plancherel": mp.norm_squared(),
        "field_energy": mp.field_energy,
        "mass_coefficient": coeff,
    });
    let doc = with_content_hash(doc);
    let path = out.join(STATE_FILE);
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    write_file(&path, &text)?;
    files.push(path);

    let phi = coulomb_potential(&state.rho);
    let mut body = String::from("# table position\nr,psi,rho,Phi\n");
    for i in 0..grid.len() {
        csv_row(
            &mut body,
            &[
                grid.nodes()[i],
                state.psi.values()[i],
                state.rho.values()[i],
                phi.values()[i],
            ],
        );
    }
    body.push_str("# table momentum\np,psi_hat,dpsi_hat,phi\n");
    for i in 0..mp.grid().len() {
        csv_row(
            &mut body,
            &[
                mp.grid().nodes()[i],
                mp.psi_hat.values()[i],
                mp.dpsi_hat.values()[i],
                mp.phi.values()[i],
            ],
        );
    }
    let path = out.join(PROFILES_FILE);
    write_csv(&path, "profiles", cfg, &[], &body)?;
    files.push(path);

    Ok(CommandOutput {
        files,
        summary: vec![
            format!(
                "eP = {:.10}  T = {:.10}  D = {:.10}  mu = {:.10}",
                state.energy, state.kinetic, state.coulomb, state.mu
            ),
            format!(
                "iterations = {}  residual = {:.3e} (position), {:.3e} (momentum)",
                state.iterations, state.residual, momentum_residual
            ),
            format!("mass coefficient (8pi/3) int psi^4 = {coeff:.10}"),
        ],
    })
}

/// One row of the verification table. Passes iff
/// `|computed − expected| ≤ tolerance`; a NaN never passes.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub computed: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.computed - self.expected).abs() <= self.tolerance
    }
}

/// Evaluate the identity suite. Relative checks are phrased as ratios with
/// expected value 1. Checks that cannot be evaluated (for instance when the
/// momentum profile is not positive) are reported with a NaN value.
pub fn verification_checks(cfg: &RunConfig, state: &PekarState) -> Vec<Check> {
    let t = state.kinetic;
    let d = state.coulomb;
    let mut checks = vec![
        Check {
            name: "virial D=2T",
            computed: d / (2.0 * t),
            expected: 1.0,
            tolerance: 1e-4,
        },
        Check {
            name: "virial eP=-T",
            computed: -state.energy / t,
            expected: 1.0,
            tolerance: 1e-4,
        },
        Check {
            name: "virial mu=3T",
            computed: state.mu / (3.0 * t),
            expected: 1.0,
            tolerance: 1e-4,
        },
        Check {
            name: "EL residual position",
            computed: state.residual,
            expected: 0.0,
            tolerance: 1e-6,
        },
    ];
    let flow = imaginary_time_oracle(&cfg.solver_options(), cfg.oracle_step)
        .map(|s| s.energy / state.energy)
        .unwrap_or(f64::NAN);
    checks.push(Check {
        name: "imaginary-time eP ratio",
        computed: flow,
        expected: 1.0,
        tolerance: 1e-4,
    });

    let quad = cfg.quadrature();
    let nan = f64::NAN;
    let mp = profile(cfg, state).ok();
    let with_mp = |f: &dyn Fn(&MomentumProfile) -> Result<f64, PolaronError>| match &mp {
        Some(mp) => f(mp).unwrap_or(nan),
        None => nan,
    };
    let one = RadialTestFunction::constant(1.0);
    let xi = RadialTestFunction::new(|k| (-k * k).exp(), true);
    let chi1 = CutoffSpec::one();

    let q1 = with_mp(&|mp| kinetic_term(mp, &chi1));
    let q2 = with_mp(&|mp| potential_term(mp, &chi1, &quad));
    let r = with_mp(&|mp| pairing_term(mp, &chi1));
    let q1_oracle = kinetic_term_position_oracle(state).unwrap_or(nan);
    let q2_oracle = potential_term_position_oracle(state).unwrap_or(nan);

    checks.extend([
        Check {
            name: "EL residual momentum",
            computed: with_mp(&|mp| el_residual_momentum(mp, &quad)),
            expected: 0.0,
            tolerance: 1e-3,
        },
        Check {
            name: "plancherel",
            computed: with_mp(&|mp| Ok(mp.norm_squared())),
            expected: 1.0,
            tolerance: 1e-5,
        },
        Check {
            name: "field energy / D",
            computed: with_mp(&|mp| Ok(mp.field_energy / d)),
            expected: 1.0,
            tolerance: 1e-4,
        },
        Check {
            name: "dpsi_hat analytic vs FD",
            computed: with_mp(&|mp| Ok(mp.derivative_mismatch)),
            expected: 0.0,
            tolerance: 1e-4,
        },
        Check {
            name: "density expectation g=1",
            computed: with_mp(&|mp| lemma1_density_expectation(mp, &one)),
            expected: 1.0,
            tolerance: 1e-5,
        },
        Check {
            name: "number expectation g=1 / D",
            computed: with_mp(&|mp| Ok(lemma1_number_expectation(mp, &one)? / d)),
            expected: 1.0,
            tolerance: 1e-4,
        },
        Check {
            name: "cross g=1 / 1D reduction",
            computed: with_mp(&|mp| Ok(lemma1_cross(mp, &xi, &one, &quad)? / lemma1_cross_unit_g(mp, &xi)?)),
            expected: 1.0,
            tolerance: 1e-3,
        },
        Check {
            name: "R=-3/2",
            computed: r,
            expected: -1.5,
            tolerance: 1e-3,
        },
        Check {
            name: "Q1-Q2=3",
            computed: q1 - q2,
            expected: 3.0,
            tolerance: 1e-2,
        },
        Check {
            name: "Q1 / position oracle",
            computed: q1 / q1_oracle,
            expected: 1.0,
            tolerance: 1e-2,
        },
        Check {
            name: "Q2 / position oracle",
            computed: q2 / q2_oracle,
            expected: 1.0,
            tolerance: 1e-2,
        },
        Check {
            name: "f endpoint",
            computed: 1.0 + (q1 - q2) / 3.0 + 4.0 * r / 3.0,
            expected: 0.0,
            tolerance: 2e-2,
        },
    ]);
    checks
}

/// `polaron verify`: `verify.csv`; fails with exit code 1 if any row fails.
pub fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CommandError> {
    prepare_dir(out)?;
    let mut files = Vec::new();
    let state = run_solver(cfg, out, &mut files)?;
    let checks = verification_checks(cfg, &state);

    let mut body = String::from("check_name,computed,expected,tolerance,pass\n");
    let mut summary = Vec::new();
    for c in &checks {
        writeln!(
            body,
            "{},{},{},{},{}",
            c.name,
            fmt_f64(c.computed),
            fmt_f64(c.expected),
            fmt_f64(c.tolerance),
            c.passed()
        )
        .unwrap();
        summary.push(format!(
            "{} {:<28} {:>24} (expected {}, tol {:e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            fmt_f64(c.computed),
            c.expected,
            c.tolerance
        ));
    }
    let path = out.join(VERIFY_FILE);
    write_csv(&path, "verification", cfg, &[], &body)?;
    files.push(path);

    let failed = checks.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        for line in &summary {
            eprintln!("{line}");
        }
        return Err(CommandError::Verification {
            failed,
            total: checks.len(),
        });
    }
    Ok(CommandOutput { files, summary })
}

/// `polaron massbound`: `massbound.csv` with one row per `ε` and the
/// `χ ≡ 1` endpoint labelled `eps = 0`.
pub fn cmd_massbound(cfg: &RunConfig, out: &Path) -> Result<CommandOutput, CommandError> {
    prepare_dir(out)?;
    let mut files = Vec::new();
    let state = run_solver(cfg, out, &mut files)?;
    let mp = profile(cfg, &state)?;
    let rows = mass_bound_sweep(
        &mp,
        cfg.cutoff_shape,
        cfg.cutoff_support_radius,
        &cfg.cutoff_eps_list,
        &cfg.quadrature(),
        &state,
    )?;
    let body = massbound_csv(&rows);
    let end = rows.last().expect("endpoint row");
    let mut notes = vec![
        format!("mass_coeff {}", fmt_f64(end.mass_coeff)),
        format!("identity_neg32 {}", fmt_f64(end.identity_neg32)),
        format!("identity_3 {}", fmt_f64(end.identity_3)),
    ];
    for row in rows.iter().filter(|r| r.f_nonpositive) {
        notes.push(format!(
            "f_nonpositive eps={} (m_lower reported as inf)",
            fmt_f64(row.eps)
        ));
    }
    let path = out.join(MASSBOUND_FILE);
    write_csv(&path, "mass bound", cfg, &notes, &body)?;
    files.push(path);

    let summary = rows
        .iter()
        .map(|r| format!("eps = {:<5} f = {:>12.5e}  m_lower = {:.5e}", r.eps, r.f, r.m_lower))
        .chain(std::iter::once(format!("mass coefficient = {:.10}", end.mass_coeff)))
        .collect();
    Ok(CommandOutput { files, summary })
}

pub fn massbound_csv(rows: &[MassBoundReport]) -> String {
    let mut body = String::from("eps,R,Q1,Q2,f,m_lower\n");
    for r in rows {
        csv_row(&mut body, &[r.eps, r.r, r.q1, r.q2, r.f, r.m_lower]);
    }
    body
}
