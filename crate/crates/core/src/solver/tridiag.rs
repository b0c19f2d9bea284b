//! Symmetric tridiagonal matrices with constant off-diagonal, as produced by
//! the three-point Laplacian on a uniform grid.

use crate::error::{PolaronError, Result};

/// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ
/// pivots of `T − xI`).
fn count_below(diag: &[f64], off: f64, x: f64) -> usize {
    let off2 = off * off;
    let mut count = 0;
    let mut d = 1.0;
    for (i, &a) in diag.iter().enumerate() {
        d = if i == 0 { a - x } else { a - x - off2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (a.abs() + x.abs() + off.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solve `(T − shift·I) x = rhs` by the Thomas algorithm. Intended for
/// positive-definite shifted matrices, so no pivoting.
pub fn solve_shifted(diag: &[f64], off: f64, shift: f64, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0] - shift;
    if beta == 0.0 || !beta.is_finite() {
        return Err(PolaronError::NumericalFailure("singular tridiagonal pivot".into()));
    }
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = off / beta;
        beta = diag[i] - shift - off * c[i];
        if beta == 0.0 || !beta.is_finite() {
            return Err(PolaronError::NumericalFailure(format!(
                "singular tridiagonal pivot at row {i}"
            )));
        }
        x[i] = (rhs[i] - off * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i + 1] * next;
    }
    Ok(x)
}

/// Lowest eigenpair of the tridiagonal matrix with diagonal `diag` and
/// constant off-diagonal `off`.
///
/// The eigenvalue is bracketed by bisection on the Sturm count; the vector
/// comes from inverse iteration shifted to the lower end of the bracket,
/// seeded with `guess` when given. Returns the Rayleigh quotient and a
/// Euclidean-normalized vector.
pub fn lowest_eigenpair(diag: &[f64], off: f64, guess: Option<&[f64]>) -> Result<(f64, Vec<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Err(PolaronError::invalid("empty tridiagonal matrix"));
    }
    // Gershgorin bracket
    let radius = 2.0 * off.abs();
    let mut lo = diag.iter().fold(f64::INFINITY, |m, &a| m.min(a)) - radius;
    let mut hi = diag.iter().fold(f64::NEG_INFINITY, |m, &a| m.max(a)) + radius;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(PolaronError::NumericalFailure("non-finite matrix entries".into()));
    }
    let scale = lo.abs().max(hi.abs()).max(1.0);
    while hi - lo > 4.0 * f64::EPSILON * scale {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // keep the shifted matrix safely positive definite
    let shift = lo - 8.0 * f64::EPSILON * scale;

    let mut v: Vec<f64> = match guess {
        Some(g) if g.len() == n && g.iter().any(|&x| x != 0.0) => g.to_vec(),
        _ => vec![1.0; n],
    };
    normalize(&mut v)?;
    for _ in 0..4 {
        v = solve_shifted(diag, off, shift, &v)?;
        normalize(&mut v)?;
    }
    let mut rq = 0.0;
    for i in 0..n {
        let mut tv = diag[i] * v[i];
        if i > 0 {
            tv += off * v[i - 1];
        }
        if i + 1 < n {
            tv += off * v[i + 1];
        }
        rq += v[i] * tv;
    }
    if !rq.is_finite() {
        return Err(PolaronError::NumericalFailure("non-finite Rayleigh quotient".into()));
    }
    Ok((rq, v))
}

fn normalize(v: &mut [f64]) -> Result<()> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(PolaronError::NumericalFailure("inverse iteration broke down".into()));
    }
    v.iter_mut().for_each(|x| *x /= norm);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian_ground_state() {
        // -u'' on (0, 1), Dirichlet: eigenvalues (2 - 2 cos(kπh)) / h²
        let n = 199;
        let h = 1.0 / (n as f64 + 1.0);
        let diag = vec![2.0 / (h * h); n];
        let (lambda, v) = lowest_eigenpair(&diag, -1.0 / (h * h), None).unwrap();
        let exact = (2.0 - 2.0 * (PI * h).cos()) / (h * h);
        assert!((lambda - exact).abs() < 1e-9 * exact, "{lambda} vs {exact}");
        let sign = v[n / 2].signum();
        for (i, &x) in v.iter().enumerate() {
            let e = (PI * (i + 1) as f64 * h).sin() * (2.0 * h).sqrt();
            assert!((sign * x - e).abs() < 1e-9);
        }
    }

    #[test]
    fn sturm_count_matches_spectrum() {
        let n = 50;
        let h = 1.0 / (n as f64 + 1.0);
        let diag = vec![2.0 / (h * h); n];
        let off = -1.0 / (h * h);
        for k in 1..=5usize {
            let between = |k: usize| (2.0 - 2.0 * (k as f64 * PI * h).cos()) / (h * h);
            let x = 0.5 * (between(k) + between(k + 1));
            assert_eq!(count_below(&diag, off, x), k);
        }
    }

    #[test]
    fn thomas_solves_linear_system() {
        let diag = vec![4.0, 5.0, 6.0, 7.0];
        let off = 1.0;
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut rhs = [0.0; 4];
        for i in 0..4 {
            rhs[i] = diag[i] * x_true[i];
            if i > 0 {
                rhs[i] += off * x_true[i - 1];
            }
            if i < 3 {
                rhs[i] += off * x_true[i + 1];
            }
        }
        let x = solve_shifted(&diag, off, 0.0, &rhs).unwrap();
        for (a, b) in x.iter().zip(x_true) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
