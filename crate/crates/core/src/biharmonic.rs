//! Navier bi-Laplacian `Δ²v = f`, `v = Δv = 0` on `∂B_rho`, solved as the
//! chain `-Δu = f`, `-Δv = u` of two Dirichlet problems.
//!
//! In plate language `v` is the deflection, `u = -Δv` the bending moment,
//! `|v'|` the edge slope and `|u'|` the shear force.

use serde::{Deserialize, Serialize};

use crate::calculus::PiecewisePower;
use crate::error::Result;
use crate::model::RadialProfile;
use crate::poisson::{self, PoissonSolution};

const RESIDUAL_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiharmonicSolution {
    pub u: PoissonSolution,
    pub v: PoissonSolution,
    /// `|v'(rho)|`
    pub slope: f64,
    /// `|u'(rho)|`
    pub shear: f64,
    pub edge_product: f64,
}

pub fn solve_biharmonic(
    source: &PiecewisePower,
    dimension: usize,
    rho: f64,
) -> Result<BiharmonicSolution> {
    let u = poisson::solve(source, dimension, rho)?;
    let v = poisson::solve(&u.u, dimension, rho)?;
    let slope = v.boundary_gradient;
    let shear = u.boundary_gradient;
    Ok(BiharmonicSolution {
        u,
        v,
        slope,
        shear,
        edge_product: slope * shear,
    })
}

pub fn solve_biharmonic_profile(
    f: &RadialProfile,
    dimension: usize,
    rho: f64,
) -> Result<BiharmonicSolution> {
    solve_biharmonic(&PiecewisePower::from_profile(f, rho), dimension, rho)
}

/// Work density of slope against shear on the plate edge, `|u'(rho)| |v'(rho)|`.
pub fn edge_work(sol: &BiharmonicSolution) -> f64 {
    sol.edge_product
}

impl BiharmonicSolution {
    pub fn rho(&self) -> f64 {
        self.u.rho
    }

    /// `int u^2` and `int f v`, which agree for Navier conditions.
    pub fn plate_energy_pair(&self, source: &PiecewisePower) -> Result<(f64, f64)> {
        Ok((self.u.l2_norm_squared()?, self.v.weighted_mass(source)?))
    }

    /// Largest `|Δ²v - f|` at sample points inside every piece.
    pub fn max_residual(&self, source: &PiecewisePower) -> f64 {
        let n = self.u.dimension;
        let bilap = self.v.u.radial_laplacian(n).radial_laplacian(n);
        let mut worst: f64 = 0.0;
        for p in self.v.u.pieces() {
            for i in 1..=RESIDUAL_SAMPLES {
                let r = p.lo + (p.hi - p.lo) * i as f64 / (RESIDUAL_SAMPLES + 1) as f64;
                worst = worst.max((bilap.eval(r) - source.eval(r)).abs());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::integrate_adaptive;
    use std::f64::consts::PI;

    fn unit() -> RadialProfile {
        RadialProfile::constant(1.0, 1.0).unwrap()
    }

    #[test]
    fn unit_ball_edge_product() {
        let sol = solve_biharmonic_profile(&unit(), 3, 1.0).unwrap();
        assert!((sol.slope - 1.0 / 45.0).abs() < 1e-16);
        assert!((sol.shear - 1.0 / 3.0).abs() < 1e-16);
        assert!((edge_work(&sol) - 1.0 / 135.0).abs() < 1e-16);
        for r in [0.0_f64, 0.3, 0.8] {
            let v = (1.0 - r * r) / 36.0 - (1.0 - r.powi(4)) / 120.0;
            assert!((sol.v.eval(r) - v).abs() < 1e-16);
        }
    }

    #[test]
    fn larger_ball_closed_form() {
        for rho in [1.2_f64, 1.717715, 2.5] {
            let sol = solve_biharmonic_profile(&unit(), 3, rho).unwrap();
            let expected = (rho * rho / 18.0 - 1.0 / 30.0) / (3.0 * rho.powi(4));
            assert!((sol.edge_product - expected).abs() < 1e-15);
        }
        let at_root = solve_biharmonic_profile(&unit(), 3, 1.717715).unwrap();
        assert!((at_root.edge_product - 0.005).abs() < 1e-7);
    }

    #[test]
    fn slope_matches_nested_quadrature() {
        // |v'(rho)| = (1/rho^2) int_0^rho s^2 u(s) ds with u from the closed form.
        let rho = 2.0;
        let u = |s: f64| {
            if s <= 1.0 {
                (1.0 - 1.0 / rho) / 3.0 + (1.0 - s * s) / 6.0
            } else {
                (1.0 / s - 1.0 / rho) / 3.0
            }
        };
        let a = integrate_adaptive(|s| s * s * u(s), 0.0, 1.0, 1e-14).unwrap();
        let b = integrate_adaptive(|s| s * s * u(s), 1.0, rho, 1e-14).unwrap();
        let sol = solve_biharmonic_profile(&unit(), 3, rho).unwrap();
        assert!((sol.slope - (a + b) / (rho * rho)).abs() < 1e-13);
    }

    #[test]
    fn zero_source() {
        let sol =
            solve_biharmonic_profile(&RadialProfile::constant(0.0, 1.0).unwrap(), 3, 1.0).unwrap();
        assert_eq!(sol.u.eval(0.5), 0.0);
        assert_eq!(sol.v.eval(0.5), 0.0);
        assert_eq!(edge_work(&sol), 0.0);
    }

    #[test]
    fn double_green_and_energy() {
        let f = RadialProfile::polynomial(vec![0.5, 0.0, 1.5, -0.4], 0.9).unwrap();
        let src = PiecewisePower::from_profile(&f, 1.6);
        let sol = solve_biharmonic(&src, 3, 1.6).unwrap();
        let area = sol.u.geometry().surface_area();
        assert!((area * sol.slope - sol.u.total_mass).abs() < 1e-13);
        assert!((area * sol.shear - sol.u.source_mass).abs() < 1e-13);
        let (uu, fv) = sol.plate_energy_pair(&src).unwrap();
        assert!((uu - fv).abs() < 1e-12 * uu.abs());
        assert!(sol.max_residual(&src) < 1e-10);
        assert!((sol.v.total_mass / (4.0 * PI)).is_finite());
    }
}
