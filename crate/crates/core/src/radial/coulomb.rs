//! Coulomb potential and Coulomb energies of radial densities via Newton's
//! theorem: `Φ(r) = 4π [ r⁻¹ ∫_0^r s² ρ ds + ∫_r^rmax s ρ ds ]`.
//!
//! Both cumulative integrals use the grid's trapezoid rule (implicit zero at
//! the origin, half weight at `r` itself), which makes the discrete bilinear
//! form `∫ a Φ[b]` symmetric in `(a, b)` exactly in exact arithmetic.

use std::f64::consts::PI;

use super::grid::{integrate_3d, RadialFunction};
use crate::error::Result;

pub fn coulomb_potential(rho: &RadialFunction) -> RadialFunction {
    let grid = rho.grid();
    let r = grid.nodes();
    let h = grid.spacing();
    let v = rho.values();
    let n = v.len();

    let mut phi = vec![0.0; n];

    // inner: ∫_0^{r_i} s² ρ ds
    let mut inner = 0.0;
    let mut prev = 0.0;
    for i in 0..n {
        let cur = r[i] * r[i] * v[i];
        inner += 0.5 * h * (prev + cur);
        prev = cur;
        phi[i] = inner / r[i];
    }

    // outer: ∫_{r_i}^{rmax} s ρ ds, accumulated from the wall inward
    let mut outer = 0.0;
    for i in (0..n - 1).rev() {
        outer += 0.5 * h * (r[i] * v[i] + r[i + 1] * v[i + 1]);
        phi[i] += outer;
    }

    for p in &mut phi {
        *p *= 4.0 * PI;
    }
    RadialFunction::new(grid.clone(), phi, rho.parity()).expect("potential of a finite density is finite")
}

/// `∬ a(x) b(y) / |x − y| dx dy`, evaluated as `∫ a · Φ[b]`.
pub fn coulomb_bilinear(a: &RadialFunction, b: &RadialFunction) -> Result<f64> {
    a.check_same_grid(b)?;
    let phi = coulomb_potential(b);
    Ok(integrate_3d(&a.product(&phi)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::grid::{build_grid, Parity, RadialGrid};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn grid(n: usize, rmax: f64) -> Arc<RadialGrid> {
        Arc::new(build_grid(n, rmax).unwrap())
    }

    /// Uniform unit ball of charge 1; the node sitting on the edge gets the
    /// midpoint value so the trapezoid rule stays second order.
    fn unit_ball(g: Arc<RadialGrid>) -> RadialFunction {
        let c = 3.0 / (4.0 * PI);
        RadialFunction::from_fn(g, Parity::Even, |r| {
            if (r - 1.0).abs() < 1e-12 {
                0.5 * c
            } else if r < 1.0 {
                c
            } else {
                0.0
            }
        })
        .unwrap()
    }

    #[test]
    fn uniform_ball_potential() {
        let rho = unit_ball(grid(3000, 3.0));
        assert!((integrate_3d(&rho) - 1.0).abs() < 1e-5);
        let phi = coulomb_potential(&rho);
        for (&r, &v) in phi.grid().nodes().iter().zip(phi.values()) {
            let exact = if r <= 1.0 { (3.0 - r * r) / 2.0 } else { 1.0 / r };
            assert!((v - exact).abs() < 1e-4, "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn uniform_ball_self_energy() {
        let rho = unit_ball(grid(3000, 3.0));
        let d = coulomb_bilinear(&rho, &rho).unwrap();
        assert!((d - 1.2).abs() < 1e-4, "{d}");
    }

    #[test]
    fn hydrogenic_potential() {
        let rho = RadialFunction::from_fn(grid(16000, 20.0), Parity::Even, |r| (-2.0 * r).exp() / PI).unwrap();
        let phi = coulomb_potential(&rho);
        for (&r, &v) in phi.grid().nodes().iter().zip(phi.values()) {
            let exact = 1.0 / r - (-2.0 * r).exp() * (1.0 + 1.0 / r);
            assert!((v - exact).abs() < 1e-6, "r={r}: {v} vs {exact}");
        }
    }

    #[test]
    fn monopole_tail() {
        let rho = RadialFunction::from_fn(grid(4000, 20.0), Parity::Even, |r| PI.powf(-1.5) * (-r * r).exp()).unwrap();
        let phi = coulomb_potential(&rho);
        let last = phi.len() - 1;
        let rphi = phi.grid().nodes()[last] * phi.values()[last];
        assert!((rphi - 1.0).abs() < 1e-8, "{rphi}");
    }

    #[test]
    fn gaussian_self_energy() {
        let rho = RadialFunction::from_fn(grid(4000, 10.0), Parity::Even, |r| PI.powf(-1.5) * (-r * r).exp()).unwrap();
        let d = coulomb_bilinear(&rho, &rho).unwrap();
        assert!((d - (2.0 / PI).sqrt()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn mismatched_grids_rejected() {
        let a = RadialFunction::from_fn(grid(100, 5.0), Parity::Even, |r| (-r).exp()).unwrap();
        let b = RadialFunction::from_fn(grid(101, 5.0), Parity::Even, |r| (-r).exp()).unwrap();
        assert!(coulomb_bilinear(&a, &b).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn bilinear_is_symmetric(
            a1 in 0.3f64..3.0, c1 in 0.0f64..3.0,
            a2 in 0.3f64..3.0, c2 in 0.0f64..3.0,
            sign in prop::bool::ANY,
        ) {
            let g = grid(1500, 15.0);
            let a = RadialFunction::from_fn(g.clone(), Parity::Even, |r| (-a1 * (r - c1).powi(2)).exp()).unwrap();
            let s = if sign { 1.0 } else { -1.0 };
            let b = RadialFunction::from_fn(g, Parity::Even, |r| s * r * (-a2 * (r - c2).powi(2)).exp()).unwrap();
            let ab = coulomb_bilinear(&a, &b).unwrap();
            let ba = coulomb_bilinear(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1e-300), "{} vs {}", ab, ba);
        }
    }

    #[test]
    fn symmetric_to_roundoff_on_realistic_sizes() {
        let g = grid(3000, 30.0);
        let a = RadialFunction::from_fn(g.clone(), Parity::Even, |r| (-0.7 * r).exp()).unwrap();
        let b = RadialFunction::from_fn(g, Parity::Even, |r| r * r * (-0.4 * r * r).exp()).unwrap();
        let (ab, ba) = (coulomb_bilinear(&a, &b).unwrap(), coulomb_bilinear(&b, &a).unwrap());
        assert!((ab - ba).abs() <= 1e-10 * ab.abs());
    }
}
