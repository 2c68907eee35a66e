//! Radial Dirichlet problem `-Δu = f` in `B_rho`, `u(rho) = 0`.
//!
//! The solution is built from the nested quadrature
//! `u(r) = int_r^rho t^(1-N) m(t) dt` with flux moment
//! `m(t) = int_0^t s^(N-1) f(s) ds`, carried out exactly piece by piece.
//! `u'(0) = 0` holds structurally because `m(t) = O(t^N)`.

use serde::{Deserialize, Serialize};

use crate::calculus::{simplify_terms, Piece, PiecewisePower, PowerTerm};
use crate::error::{Error, Result};
use crate::model::{BallGeometry, RadialProfile};

/// Highest power of `ln r` a solution may carry. Only `N = 2` produces logs
/// (through the `t^-1` term of the outer quadrature); sources carrying
/// `r^-2 ln(r)^j` terms raise the power by one per solve.
pub const MAX_LOG_POWER: u32 = 8;

const RESIDUAL_SAMPLES: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoissonSolution {
    pub rho: f64,
    pub dimension: usize,
    /// `m(t) = int_0^t s^(N-1) f(s) ds`.
    pub flux_moment: PiecewisePower,
    pub u: PiecewisePower,
    /// `u'(r) = -m(r) r^(1-N)`.
    pub du: PiecewisePower,
    /// `|u'(rho)|`.
    pub boundary_gradient: f64,
    /// `int_{B_rho} u`.
    pub total_mass: f64,
    /// `int_{B_rho} f`.
    pub source_mass: f64,
}

fn eval_terms(terms: &[PowerTerm], r: f64) -> f64 {
    terms.iter().map(|t| t.eval(r)).sum()
}

fn antiderivative(terms: &[PowerTerm]) -> Vec<PowerTerm> {
    simplify_terms(terms.iter().flat_map(PowerTerm::antiderivative).collect())
}

fn check_regular_at_zero(terms: &[PowerTerm]) -> Result<()> {
    match terms.iter().find(|t| t.exponent <= -1) {
        Some(t) => Err(Error::SingularAtZero {
            exponent: t.exponent,
        }),
        None => Ok(()),
    }
}

/// Solve with a piecewise power-log source; the source is truncated at `rho`
/// and taken as zero where undefined.
pub fn solve(source: &PiecewisePower, dimension: usize, rho: f64) -> Result<PoissonSolution> {
    let geometry = BallGeometry::new(dimension, rho)?;
    let src = source.restrict(0.0, rho);
    let weighted = src.mul_power(dimension as i32 - 1);

    let mut moment_pieces = Vec::with_capacity(weighted.pieces().len());
    let mut m_prev = 0.0;
    for p in weighted.pieces() {
        if p.lo == 0.0 {
            check_regular_at_zero(&p.terms)?;
        }
        let anti = antiderivative(&p.terms);
        let shift = m_prev - eval_terms(&anti, p.lo);
        let mut terms = anti;
        terms.push(PowerTerm::new(shift, 0));
        let terms = simplify_terms(terms);
        m_prev = eval_terms(&terms, p.hi);
        moment_pieces.push(Piece {
            lo: p.lo,
            hi: p.hi,
            terms,
        });
    }
    let flux_moment = PiecewisePower::new(moment_pieces)?;
    let slope = flux_moment.mul_power(1 - dimension as i32);

    let mut u_pieces: Vec<Piece> = Vec::with_capacity(slope.pieces().len());
    let mut u_next = 0.0;
    for p in slope.pieces().iter().rev() {
        if p.lo == 0.0 {
            check_regular_at_zero(&p.terms)?;
        }
        let anti = antiderivative(&p.terms);
        let shift = u_next + eval_terms(&anti, p.hi);
        let mut terms: Vec<PowerTerm> = anti
            .iter()
            .map(|t| PowerTerm::with_log(-t.coefficient, t.exponent, t.log_power))
            .collect();
        terms.push(PowerTerm::new(shift, 0));
        let terms = simplify_terms(terms);
        u_next = eval_terms(&terms, p.lo);
        u_pieces.push(Piece {
            lo: p.lo,
            hi: p.hi,
            terms,
        });
    }
    u_pieces.reverse();
    let u = PiecewisePower::new(u_pieces)?;

    let log_power = u.max_log_power();
    if log_power > MAX_LOG_POWER {
        return Err(Error::LogClosureUnsupported {
            log_power,
            limit: MAX_LOG_POWER,
        });
    }

    let du = slope.scale(-1.0);
    let m_rho = flux_moment.eval(rho);
    let boundary_gradient = (m_rho / rho.powi(dimension as i32 - 1)).abs();
    let total_mass = u.volume_integral(&geometry)?;
    let source_mass = geometry.omega() * m_rho;

    Ok(PoissonSolution {
        rho,
        dimension,
        flux_moment,
        u,
        du,
        boundary_gradient,
        total_mass,
        source_mass,
    })
}

/// Solve with a piecewise polynomial source profile.
pub fn solve_profile(f: &RadialProfile, dimension: usize, rho: f64) -> Result<PoissonSolution> {
    solve(&PiecewisePower::from_profile(f, rho), dimension, rho)
}

/// `u_0` solves `-Δu_0 = 1`, `u_k` solves `-Δu_k = u_(k-1)`; returns `[u_0, ..., u_(n-1)]`.
pub fn iterate(dimension: usize, rho: f64, n: usize) -> Result<Vec<PoissonSolution>> {
    iterate_from(&PiecewisePower::constant(1.0, 0.0, rho), dimension, rho, n)
}

/// Like [`iterate`] with an arbitrary first source.
pub fn iterate_from(
    source: &PiecewisePower,
    dimension: usize,
    rho: f64,
    n: usize,
) -> Result<Vec<PoissonSolution>> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "iteration depth must be at least 1".into(),
        ));
    }
    let mut out: Vec<PoissonSolution> = Vec::with_capacity(n);
    let mut current = source.clone();
    for _ in 0..n {
        let sol = solve(&current, dimension, rho)?;
        current = sol.u.clone();
        out.push(sol);
    }
    Ok(out)
}

impl PoissonSolution {
    pub fn geometry(&self) -> BallGeometry {
        BallGeometry {
            dimension: self.dimension,
            radius: self.rho,
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.u.eval(r)
    }

    /// `u'(r)`; zero at the origin.
    pub fn derivative(&self, r: f64) -> f64 {
        if r == 0.0 {
            0.0
        } else {
            self.du.eval(r)
        }
    }

    pub fn boundary_gradient(&self) -> f64 {
        self.boundary_gradient
    }

    /// `int_{B_rho} |∇u|^2`.
    pub fn dirichlet_energy(&self) -> Result<f64> {
        self.du.mul(&self.du).volume_integral(&self.geometry())
    }

    /// `int_{B_rho} u^2`.
    pub fn l2_norm_squared(&self) -> Result<f64> {
        self.u.mul(&self.u).volume_integral(&self.geometry())
    }

    /// `int_{B_rho} h u`.
    pub fn weighted_mass(&self, h: &PiecewisePower) -> Result<f64> {
        h.restrict(0.0, self.rho)
            .mul(&self.u)
            .volume_integral(&self.geometry())
    }

    /// Largest `|Δu + f|` over sample points inside every piece.
    pub fn max_residual(&self, source: &PiecewisePower) -> f64 {
        let lap = self.u.radial_laplacian(self.dimension);
        let mut worst: f64 = 0.0;
        for p in self.u.pieces() {
            for i in 1..=RESIDUAL_SAMPLES {
                let r = p.lo + (p.hi - p.lo) * i as f64 / (RESIDUAL_SAMPLES + 1) as f64;
                worst = worst.max((lap.eval(r) + source.eval(r)).abs());
            }
        }
        worst
    }
}
