//! Integral existence conditions for `QS(f, g)` and `B(f, g)` on a ball core,
//! and the transfer criteria derived from classical inequalities.
//!
//! Every check returns a [`ConditionReport`] with `margin = lhs - rhs`; the
//! conditions are strict, so a report holds exactly when the margin is
//! positive. Differences within a few ulps of the operands count as ties.

use serde::{Deserialize, Serialize};

use crate::calculus::{
    integrate_adaptive, surface_integral_of_value, volume_integral, PiecewisePower,
};
use crate::error::{Error, Result};
use crate::model::{BallGeometry, ProblemSpec, RadialProfile};
use crate::poisson::{self, PoissonSolution};

/// First zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConditionId {
    QsIntegral,
    BIntegral,
    ProportionalReduction,
    HolderP,
    InterpolationTheta,
    Eigenvalue,
    HardyTransfer,
    SignCondition,
    MeanTransfer,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
    /// Residual of an auxiliary identity evaluated alongside the condition.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(default)]
    pub annotations: Vec<String>,
}

/// `lhs - rhs`, with ties inside rounding noise snapped to zero.
pub fn strict_margin(lhs: f64, rhs: f64) -> f64 {
    let margin = lhs - rhs;
    if margin.abs() <= 16.0 * f64::EPSILON * lhs.abs().max(rhs.abs()) {
        0.0
    } else {
        margin
    }
}

impl ConditionReport {
    pub fn new(condition_id: ConditionId, lhs: f64, rhs: f64) -> Self {
        let margin = strict_margin(lhs, rhs);
        Self {
            condition_id,
            lhs,
            rhs,
            margin,
            holds: margin > 0.0,
            residual: None,
            annotations: Vec::new(),
        }
    }

    pub fn annotate(mut self, note: impl Into<String>) -> Self {
        self.annotations.push(note.into());
        self
    }

    fn with_residual(mut self, residual: f64) -> Self {
        self.residual = Some(residual);
        self
    }
}

fn source_mass(spec: &ProblemSpec) -> Result<f64> {
    volume_integral(&spec.f, &spec.core())
}

fn core_solution(spec: &ProblemSpec) -> Result<PoissonSolution> {
    poisson::solve_profile(&spec.f, spec.dimension, spec.core_radius)
}

fn monotonicity_warning(spec: &ProblemSpec, report: ConditionReport) -> ConditionReport {
    if spec.g_decreasing_somewhere() {
        report.annotate(
            "warning: g decreases on [R, rho_max]; necessity of the QS condition \
             assumes g nondecreasing in r",
        )
    } else {
        report
    }
}

/// `int_C f > int_{∂C} g`, necessary and sufficient for a radial solution of `QS(f, g)`.
pub fn check_qs(spec: &ProblemSpec) -> Result<ConditionReport> {
    let core = spec.core();
    let lhs = source_mass(spec)?;
    let rhs = surface_integral_of_value(spec.g.eval(spec.core_radius), &core);
    let mut report = ConditionReport::new(ConditionId::QsIntegral, lhs, rhs)
        .annotate(format!("total source strength int_C f = {lhs:.10}"))
        .annotate(format!(
            "total flux through the core boundary int_dC g = {rhs:.10}"
        ));
    if spec.g.constant_from(spec.core_radius).is_some() {
        report = report.annotate(format!(
            "constant g = c: condition reads c < {:.10}",
            lhs / core.surface_area()
        ));
    }
    Ok(monotonicity_warning(spec, report))
}

/// `(int_{∂C} sqrt g)^2 < int_C f * int_C u_C`, sufficient for `B(f, g)`.
pub fn check_b(spec: &ProblemSpec) -> Result<ConditionReport> {
    let core = spec.core();
    let load = source_mass(spec)?;
    let moment = core_solution(spec)?.total_mass;
    let lhs = load * moment;
    let edge = surface_integral_of_value(spec.g.eval(spec.core_radius).sqrt(), &core);
    let rhs = edge * edge;
    let mut report = ConditionReport::new(ConditionId::BIntegral, lhs, rhs)
        .annotate(format!("total transverse load int_C f = {load:.10}"))
        .annotate(format!(
            "total integrated bending moment int_C u_C = {moment:.10}"
        ))
        .annotate(format!("edge work measure (int_dC sqrt g)^2 = {rhs:.10}"))
        .annotate("sufficient condition only: failure does not exclude a solution");
    if spec.g.constant_from(spec.core_radius).is_some() {
        let area = core.surface_area();
        report = report.annotate(format!(
            "constant g = c: condition reads c < {:.10}",
            lhs / (area * area)
        ));
    }
    Ok(report)
}

/// `QS(f, sqrt(lambda g))`: the bi-Laplacian problem when `|∇u| = lambda |∇v|`
/// on the free boundary.
pub fn check_proportional_reduction(spec: &ProblemSpec, lambda: f64) -> Result<ConditionReport> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let core = spec.core();
    let lhs = source_mass(spec)?;
    let boundary = (lambda * spec.g.eval(spec.core_radius)).sqrt();
    let rhs = surface_integral_of_value(boundary, &core);
    Ok(
        ConditionReport::new(ConditionId::ProportionalReduction, lhs, rhs).annotate(format!(
            "slope/shear proportionality lambda = {lambda}; reduced boundary data sqrt(lambda g)"
        )),
    )
}

/// `int_C f > (int_{∂C} g^p)^(1/p) |∂C|^(1-1/p)`, which implies the QS condition.
pub fn check_holder(spec: &ProblemSpec, p: f64) -> Result<ConditionReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Hölder exponent must exceed 1, got {p}"
        )));
    }
    let core = spec.core();
    let area = core.surface_area();
    let lhs = source_mass(spec)?;
    let g_r = spec.g.eval(spec.core_radius);
    let lp = surface_integral_of_value(g_r.powf(p), &core);
    let rhs = lp.powf(1.0 / p) * area.powf(1.0 - 1.0 / p);
    Ok(ConditionReport::new(ConditionId::HolderP, lhs, rhs)
        .annotate(format!("p = {p}; holding implies the QS condition")))
}

/// `int_C f > (int g^s)^(theta/s) (int g)^(1-theta)` with `1/r = theta/s + 1 - theta`.
pub fn check_interpolation(spec: &ProblemSpec, r: f64, s: f64) -> Result<ConditionReport> {
    if !(1.0 <= r && r < s && s.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "interpolation exponents must satisfy 1 <= r < s < inf, got r = {r}, s = {s}"
        )));
    }
    let theta = (1.0 - 1.0 / r) / (1.0 - 1.0 / s);
    let core = spec.core();
    let lhs = source_mass(spec)?;
    let g_r = spec.g.eval(spec.core_radius);
    let ls = surface_integral_of_value(g_r.powf(s), &core);
    let l1 = surface_integral_of_value(g_r, &core);
    let rhs = ls.powf(theta / s) * l1.powf(1.0 - theta);
    Ok(
        ConditionReport::new(ConditionId::InterpolationTheta, lhs, rhs)
            .annotate(format!("r = {r}, s = {s}, theta = {theta}")),
    )
}

/// First Dirichlet eigenvalue of the Laplacian on `B_R` for `N = 2, 3`.
pub fn dirichlet_eigenvalue_ball(dimension: usize, radius: f64) -> Result<f64> {
    let j = match dimension {
        2 => BESSEL_J0_FIRST_ZERO,
        3 => std::f64::consts::PI,
        n => return Err(Error::UnsupportedDimension(n)),
    };
    Ok(j * j / (radius * radius))
}

fn bessel_j0(x: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..60 {
        term *= q / (m as f64 * m as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Radial eigenfunction of the ball, normalized to 1 at the centre.
fn ball_eigenfunction(dimension: usize, k: f64, r: f64) -> f64 {
    let x = k * r;
    match dimension {
        2 => bessel_j0(x),
        _ => {
            if x == 0.0 {
                1.0
            } else {
                x.sin() / x
            }
        }
    }
}

/// Self-test of the hard-coded eigenvalue: largest `|Δw + λ₁ w|` (finite
/// differences, relative to `λ₁`) over interior samples, and `|w(R)|`.
pub fn eigenvalue_self_test(dimension: usize, radius: f64) -> Result<(f64, f64)> {
    let lambda = dirichlet_eigenvalue_ball(dimension, radius)?;
    let k = lambda.sqrt();
    let w = |r: f64| ball_eigenfunction(dimension, k, r);
    let h = 1e-4 * radius;
    let mut worst: f64 = 0.0;
    for i in 1..40 {
        let r = radius * i as f64 / 40.0;
        let d2 = (w(r + h) - 2.0 * w(r) + w(r - h)) / (h * h);
        let d1 = (w(r + h) - w(r - h)) / (2.0 * h);
        let lap = d2 + (dimension as f64 - 1.0) * d1 / r;
        worst = worst.max((lap + lambda * w(r)).abs() / lambda);
    }
    Ok((worst, w(radius).abs()))
}

/// `alpha int_C f^2 > int_{∂C} g` for `alpha >= 1/λ₁(C)`.
pub fn check_eigenvalue(spec: &ProblemSpec, alpha: f64) -> Result<ConditionReport> {
    let lambda = dirichlet_eigenvalue_ball(spec.dimension, spec.core_radius)?;
    let bound = 1.0 / lambda;
    if alpha < bound * (1.0 - 4.0 * f64::EPSILON) {
        return Err(Error::AlphaTooSmall { alpha, bound });
    }
    let core = spec.core();
    let f = PiecewisePower::from_profile(&spec.f, spec.core_radius);
    let lhs = alpha * f.mul(&f).volume_integral(&core)?;
    let rhs = surface_integral_of_value(spec.g.eval(spec.core_radius), &core);
    Ok(ConditionReport::new(ConditionId::Eigenvalue, lhs, rhs)
        .annotate(format!("lambda_1(C) = {lambda:.12}, alpha = {alpha}")))
}

/// Hardy transfer on `B_rho` with `d = rho - r`:
/// `c int |∇u|^p >= int |u/d|^p` whenever `c >= (p/(p-1))^p`.
pub fn check_hardy(
    u: &RadialProfile,
    dimension: usize,
    rho: f64,
    p: f64,
    c: f64,
    quad_tol: f64,
) -> Result<ConditionReport> {
    if !(p > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Hardy exponent must exceed 1, got {p}"
        )));
    }
    let bound = (p / (p - 1.0)).powf(p);
    if c < bound {
        return Err(Error::CTooSmall { c, bound });
    }
    let ball = BallGeometry::new(dimension, rho)?;
    let scale = u
        .sample_points(0.0, rho)
        .iter()
        .fold(0.0_f64, |m, &r| m.max(u.eval(r).abs()));
    if u.eval(rho).abs() > 1e-12 * scale.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "u must vanish on the boundary, u({rho}) = {}",
            u.eval(rho)
        )));
    }
    let weight = |r: f64| r.powi(dimension as i32 - 1);
    let mut knots: Vec<f64> = u
        .segments()
        .iter()
        .map(|s| s.lo)
        .filter(|&k| k > 0.0 && k < rho)
        .collect();
    knots.insert(0, 0.0);
    knots.push(rho);
    let mut grad = 0.0;
    let mut quotient = 0.0;
    for w in knots.windows(2) {
        grad += integrate_adaptive(
            |r| u.eval_derivative(r).abs().powf(p) * weight(r),
            w[0],
            w[1],
            quad_tol,
        )?;
        quotient += integrate_adaptive(
            |r| (u.eval(r) / (rho - r)).abs().powf(p) * weight(r),
            w[0],
            w[1],
            quad_tol,
        )?;
    }
    let lhs = c * ball.omega() * grad;
    let rhs = ball.omega() * quotient;
    Ok(ConditionReport::new(ConditionId::HardyTransfer, lhs, rhs)
        .annotate(format!("p = {p}, c = {c}, Hardy constant bound {bound}")))
}

/// Sign-condition transfer: for `φ > 0`, `Δφ <= 0` on `C`,
/// `int_C f φ = int_{∂C} |∇u_C| φ - int_C u_C Δφ >= int_{∂C} |∇u_C| φ`.
pub fn check_sign_condition(spec: &ProblemSpec, phi: &RadialProfile) -> Result<ConditionReport> {
    let r_c = spec.core_radius;
    if let Some((r, v)) = phi.find_non_positive(0.0, r_c) {
        return Err(Error::PhiNotSuperharmonic {
            r,
            reason: format!("phi must be positive on C, phi = {v}"),
        });
    }
    let lap = phi.radial_laplacian(spec.dimension)?;
    let lap_scale = lap
        .sample_points(0.0, r_c)
        .iter()
        .fold(1.0_f64, |m, &r| m.max(lap.eval(r).abs()));
    if let Some(r) = lap
        .sample_points(0.0, r_c)
        .into_iter()
        .find(|&r| lap.eval(r) > 1e-12 * lap_scale)
    {
        return Err(Error::PhiNotSuperharmonic {
            r,
            reason: format!("Laplacian of phi is positive ({})", lap.eval(r)),
        });
    }
    let core = spec.core();
    let sol = core_solution(spec)?;
    let f = PiecewisePower::from_profile(&spec.f, r_c);
    let phi_pw = PiecewisePower::from_profile(phi, r_c);
    let lap_pw = PiecewisePower::from_profile(&lap, r_c);
    let lhs = f.mul(&phi_pw).volume_integral(&core)?;
    let rhs = surface_integral_of_value(sol.boundary_gradient * phi.eval(r_c), &core);
    let correction = -sol.weighted_mass(&lap_pw)?;
    let residual = (lhs - rhs - correction).abs();
    Ok(ConditionReport::new(ConditionId::SignCondition, lhs, rhs)
        .with_residual(residual)
        .annotate(format!(
            "Green decomposition: -int_C u_C Δphi = {correction:.12}, residual {residual:.3e}"
        )))
}

/// Pointwise means of positive numbers, in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Means {
    pub min: f64,
    pub harmonic: f64,
    pub geometric: f64,
    pub arithmetic: f64,
    pub quadratic: f64,
    pub max: f64,
}

pub const MEAN_NAMES: [&str; 6] = [
    "min",
    "harmonic",
    "geometric",
    "arithmetic",
    "quadratic",
    "max",
];

impl Means {
    pub fn of(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("means of an empty list".into()));
        }
        if let Some(&v) = values.iter().find(|&&v| !(v > 0.0)) {
            return Err(Error::NonPositiveInput {
                r: f64::NAN,
                value: v,
            });
        }
        let n = values.len() as f64;
        Ok(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            harmonic: n / values.iter().map(|v| 1.0 / v).sum::<f64>(),
            geometric: (values.iter().map(|v| v.ln()).sum::<f64>() / n).exp(),
            arithmetic: values.iter().sum::<f64>() / n,
            quadratic: (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt(),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }

    pub fn as_array(&self) -> [f64; 6] {
        [
            self.min,
            self.harmonic,
            self.geometric,
            self.arithmetic,
            self.quadratic,
            self.max,
        ]
    }

    /// Largest amount by which a mean falls below its predecessor, scaled by
    /// the magnitude; zero when the chain is ordered up to rounding.
    pub fn order_violation(&self) -> f64 {
        const ROUNDING: f64 = 64.0 * f64::EPSILON;
        let a = self.as_array();
        a.windows(2)
            .map(|w| (w[0] - w[1]) / w[1].abs().max(f64::MIN_POSITIVE))
            .map(|v| if v <= ROUNDING { 0.0 } else { v })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanTransfer {
    /// QS reports for min, harmonic, geometric, arithmetic, quadratic, max.
    pub reports: Vec<ConditionReport>,
    pub ordered: bool,
    pub max_order_violation: f64,
}

/// QS conditions for the six pointwise means of `functions` against the
/// spec's `g`; the spec's own `f` is not used.
pub fn check_mean_transfer(
    spec: &ProblemSpec,
    functions: &[RadialProfile],
) -> Result<MeanTransfer> {
    if functions.is_empty() {
        return Err(Error::InvalidArgument("no functions supplied".into()));
    }
    let r_c = spec.core_radius;
    let mut knots: Vec<f64> = functions
        .iter()
        .flat_map(|f| f.segments().iter().map(|s| s.lo).collect::<Vec<_>>())
        .filter(|&k| k > 0.0 && k < r_c)
        .collect();
    knots.push(0.0);
    knots.push(r_c);
    knots.sort_by(f64::total_cmp);
    knots.dedup();

    let values_at = |r: f64| -> Vec<f64> { functions.iter().map(|f| f.eval(r)).collect() };
    let mut violation: f64 = 0.0;
    for f in functions {
        for r in f.sample_points(0.0, r_c) {
            let vals = values_at(r);
            if let Some(&v) = vals.iter().find(|&&v| !(v > 0.0)) {
                return Err(Error::NonPositiveInput { r, value: v });
            }
            violation = violation.max(Means::of(&vals)?.order_violation());
        }
    }

    let core = spec.core();
    let weight = |r: f64| r.powi(spec.dimension as i32 - 1);
    let rhs = surface_integral_of_value(spec.g.eval(r_c), &core);
    let mut integrals = [0.0; 6];
    for (slot, integral) in integrals.iter_mut().enumerate() {
        for w in knots.windows(2) {
            *integral += integrate_adaptive(
                |r| {
                    let m = Means::of(&values_at(r)).map(|m| m.as_array()[slot]);
                    m.unwrap_or(f64::NAN) * weight(r)
                },
                w[0],
                w[1],
                spec.tolerances.quad_tol,
            )?;
        }
        *integral *= core.omega();
    }
    let reports = integrals
        .iter()
        .zip(MEAN_NAMES)
        .map(|(&lhs, name)| {
            ConditionReport::new(ConditionId::MeanTransfer, lhs, rhs)
                .annotate(format!("QS condition for the pointwise {name} mean"))
        })
        .collect();
    Ok(MeanTransfer {
        reports,
        ordered: violation <= 1e-14,
        max_order_violation: violation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyReport {
    pub integral_f: f64,
    pub integral_u_c: f64,
    pub core_surface: f64,
    /// Largest constant `g` for which the QS condition holds (exclusive).
    pub c_qs: f64,
    /// Largest constant `g` for which the B condition holds (exclusive).
    pub c_b: f64,
    /// `c_qs / c_b`; `None` when `c_b = 0`.
    pub ratio: Option<f64>,
    pub annotations: Vec<String>,
}

/// Thresholds on a constant `g` for the QS and B conditions, from integrals.
pub fn hierarchy_report(spec: &ProblemSpec) -> Result<HierarchyReport> {
    if spec.g.constant_from(spec.core_radius).is_none() {
        return Err(Error::NonConstantG);
    }
    let core = spec.core();
    let area = core.surface_area();
    let integral_f = source_mass(spec)?;
    let integral_u_c = core_solution(spec)?.total_mass;
    let c_qs = integral_f / area;
    let c_b = integral_f * integral_u_c / (area * area);
    let ratio = (c_b != 0.0).then(|| c_qs / c_b);
    let mut annotations = vec![format!(
        "B threshold is {} times stricter than QS",
        ratio.map_or_else(|| "undefined".to_string(), |r| format!("{r:.6}"))
    )];
    if spec.dimension == 3 && spec.f.constant_from(0.0).is_some() {
        let r = spec.core_radius;
        annotations.push(format!(
            "constant f in N = 3: int_C u_C = 4 pi R^5/45 and c_B = R^4/135 = {:.6}; \
             the alternative reading int_C u_C = 4 pi R^5/15, c_B = R^4/45 = {:.6} \
             is not supported by direct integration",
            r.powi(4) / 135.0,
            r.powi(4) / 45.0
        ));
    }
    Ok(HierarchyReport {
        integral_f,
        integral_u_c,
        core_surface: area,
        c_qs,
        c_b,
        ratio,
        annotations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityData {
    /// `Φ_{√g}(C) = int_{∂C} sqrt g`.
    pub phi_sqrt_g: f64,
    /// `T(C, u_C) = int_C u_C`.
    pub t_u_c: f64,
    /// `T(C, f) = int_C f`.
    pub t_f: f64,
    /// `g_1 = g1_factor * sqrt g`.
    pub g1_factor: f64,
    /// `g_2 = g2_factor * sqrt g`.
    pub g2_factor: f64,
    pub g1_at_core: f64,
    pub g2_at_core: f64,
    pub b_condition: ConditionReport,
    /// QS condition for `(f, g_1)`.
    pub qs_f_g1: ConditionReport,
    /// QS condition for `(u_C, g_2)`.
    pub qs_uc_g2: ConditionReport,
}

/// Boundary data `g_1`, `g_2` dual to the B condition and the two QS
/// conditions they induce.
pub fn duality_data(spec: &ProblemSpec) -> Result<DualityData> {
    let core = spec.core();
    let sqrt_g = spec.g.eval(spec.core_radius).sqrt();
    let phi_sqrt_g = surface_integral_of_value(sqrt_g, &core);
    let t_f = source_mass(spec)?;
    let t_u_c = core_solution(spec)?.total_mass;
    let g1_factor = phi_sqrt_g / t_u_c;
    let g2_factor = phi_sqrt_g / t_f;
    let g1_at_core = g1_factor * sqrt_g;
    let g2_at_core = g2_factor * sqrt_g;
    let qs_f_g1 = ConditionReport::new(
        ConditionId::QsIntegral,
        t_f,
        surface_integral_of_value(g1_at_core, &core),
    )
    .annotate("QS(f, g_1), g_1 = Φ_sqrt(g)(C) / T(C, u_C) * sqrt g");
    let qs_uc_g2 = ConditionReport::new(
        ConditionId::QsIntegral,
        t_u_c,
        surface_integral_of_value(g2_at_core, &core),
    )
    .annotate("QS(u_C, g_2), g_2 = Φ_sqrt(g)(C) / T(C, f) * sqrt g");
    Ok(DualityData {
        phi_sqrt_g,
        t_u_c,
        t_f,
        g1_factor,
        g2_factor,
        g1_at_core,
        g2_at_core,
        b_condition: check_b(spec)?,
        qs_f_g1,
        qs_uc_g2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn family(c: f64) -> ProblemSpec {
        ProblemSpec::unit_ball_constant(c)
    }

    #[test]
    fn qs_examples() {
        let r = check_qs(&family(0.2)).unwrap();
        assert!((r.lhs - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((r.rhs - 0.8 * PI).abs() < 1e-14);
        assert!(r.holds);

        let tie = check_qs(&family(1.0 / 3.0)).unwrap();
        assert_eq!(tie.margin, 0.0);
        assert!(!tie.holds);

        let lin = family(0.1).with_g(RadialProfile::polynomial_everywhere(vec![0.0, 1.0 / 3.0]));
        let r = check_qs(&lin).unwrap();
        assert!((r.rhs - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(!r.holds);
    }

    #[test]
    fn qs_warns_on_decreasing_g() {
        let spec = family(0.1).with_g(RadialProfile::polynomial_everywhere(vec![1.0, -0.1]));
        let r = check_qs(&spec).unwrap();
        assert!(r.annotations.iter().any(|a| a.starts_with("warning")));
    }

    #[test]
    fn b_examples() {
        let r = check_b(&family(0.005)).unwrap();
        assert!((r.lhs - 16.0 * PI * PI / 135.0).abs() < 1e-13);
        assert!((r.rhs - 16.0 * PI * PI * 0.005).abs() < 1e-13);
        assert!(r.holds);
        let tie = check_b(&family(1.0 / 135.0)).unwrap();
        assert_eq!(tie.margin, 0.0);
        assert!(!tie.holds);
        assert!(!check_b(&family(0.0076)).unwrap().holds);
    }

    #[test]
    fn proportional_reduction() {
        let below = check_proportional_reduction(&family(0.12), 1.0).unwrap();
        let above = check_proportional_reduction(&family(0.1), 1.0).unwrap();
        assert!(!below.holds && above.holds);

        let spec = family(0.02);
        let a = check_proportional_reduction(&spec, 4.0).unwrap();
        let b = check_proportional_reduction(&spec.with_g(spec.g.scaled(4.0)), 1.0).unwrap();
        assert!((a.rhs - b.rhs).abs() < 1e-15);
        assert!((a.rhs - 4.0 * PI * 0.08_f64.sqrt()).abs() < 1e-13);
        assert!((a.rhs - 3.5543).abs() < 1e-4);
        assert!(a.holds);
        assert!(check_proportional_reduction(&spec, 0.0).is_err());
    }

    #[test]
    fn holder_examples() {
        let spec = family(0.2);
        let qs = check_qs(&spec).unwrap();
        for p in [1.5, 2.0, 7.0] {
            let h = check_holder(&spec, p).unwrap();
            assert!((h.rhs - qs.rhs).abs() < 1e-13);
        }
        let lin = family(0.2).with_g(RadialProfile::polynomial_everywhere(vec![0.0, 0.2]));
        let h = check_holder(&lin, 2.0).unwrap();
        assert!((h.rhs - 4.0 * PI / 5.0).abs() < 1e-13);
        assert!(h.holds);
        assert!(!check_holder(&family(1.0), 3.0).unwrap().holds);
        assert!(check_holder(&spec, 1.0).is_err());
    }

    #[test]
    fn interpolation_on_spheres() {
        // constant g: rhs = g |S|^(1/r)
        let spec = family(0.2);
        let r = check_interpolation(&spec, 1.5, 3.0).unwrap();
        assert!((r.rhs - 0.2 * (4.0 * PI).powf(1.0 / 1.5)).abs() < 1e-13);
        let one = check_interpolation(&spec, 1.0, 3.0).unwrap();
        assert!((one.rhs - check_qs(&spec).unwrap().rhs).abs() < 1e-13);
        assert!(check_interpolation(&spec, 3.0, 2.0).is_err());
    }

    #[test]
    fn eigenvalue_examples() {
        let l3 = dirichlet_eigenvalue_ball(3, 1.0).unwrap();
        assert!((l3 - PI * PI).abs() < 1e-14);
        let (res, edge) = eigenvalue_self_test(3, 1.0).unwrap();
        assert!(res < 1e-6 && edge < 1e-15);
        let (res, edge) = eigenvalue_self_test(2, 1.3).unwrap();
        assert!(res < 1e-6 && edge < 1e-12, "{res} {edge}");
        assert!(dirichlet_eigenvalue_ball(4, 1.0).is_err());

        let r = check_eigenvalue(&family(0.01), 1.0 / (PI * PI)).unwrap();
        assert!((r.lhs - 4.0 / (3.0 * PI)).abs() < 1e-14);
        assert!((r.rhs - 0.04 * PI).abs() < 1e-14);
        assert!(r.holds);
        assert!(matches!(
            check_eigenvalue(&family(0.01), 0.09),
            Err(Error::AlphaTooSmall { .. })
        ));
    }

    #[test]
    fn hardy_examples() {
        let linear = RadialProfile::polynomial(vec![1.0, -1.0], 1.0).unwrap();
        let r = check_hardy(&linear, 3, 1.0, 2.0, 4.0, 1e-12).unwrap();
        assert!((r.lhs - 16.0 * PI / 3.0).abs() < 1e-10);
        assert!((r.rhs - 4.0 * PI / 3.0).abs() < 1e-10);
        assert!(r.holds);

        // u = 1 - r^2: lhs = 4 * 4pi int 4 r^4 = 64pi/5, rhs = 4pi int r^2 (1+r)^2 = 4pi * 62/60
        let quad = RadialProfile::polynomial(vec![1.0, 0.0, -1.0], 1.0).unwrap();
        let r = check_hardy(&quad, 3, 1.0, 2.0, 4.0, 1e-12).unwrap();
        assert!((r.lhs - 64.0 * PI / 5.0).abs() < 1e-10);
        assert!((r.rhs - 4.0 * PI * 62.0 / 60.0).abs() < 1e-10);
        assert!(r.holds);

        assert!(matches!(
            check_hardy(&quad, 3, 1.0, 2.0, 3.9, 1e-12),
            Err(Error::CTooSmall { .. })
        ));
    }

    #[test]
    fn sign_condition_examples() {
        let spec = family(0.1);
        let one = check_sign_condition(&spec, &RadialProfile::constant(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(one.margin, 0.0);
        assert!(one.residual.unwrap() < 1e-14);

        let phi = RadialProfile::polynomial(vec![2.0, 0.0, -1.0], 1.0).unwrap();
        let r = check_sign_condition(&spec, &phi).unwrap();
        assert!((r.lhs - 28.0 * PI / 15.0).abs() < 1e-13);
        assert!((r.rhs - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!(r.residual.unwrap() < 1e-10);
        assert!(r.holds);

        let bad = RadialProfile::polynomial(vec![0.1, 0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            check_sign_condition(&spec, &bad),
            Err(Error::PhiNotSuperharmonic { .. })
        ));
    }

    #[test]
    fn means_of_two_numbers() {
        let m = Means::of(&[1.0, 4.0]).unwrap();
        let expected = [1.0, 1.6, 2.0, 2.5, 8.5_f64.sqrt(), 4.0];
        for (a, b) in m.as_array().iter().zip(expected) {
            assert!((a - b).abs() < 1e-15);
        }
        let same = Means::of(&[3.0, 3.0]).unwrap();
        assert!(same.as_array().iter().all(|&v| (v - 3.0).abs() < 1e-15));
        assert!(Means::of(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn mean_transfer_example() {
        let spec = family(0.5);
        let fs = [
            RadialProfile::constant(1.0, 1.0).unwrap(),
            RadialProfile::constant(4.0, 1.0).unwrap(),
        ];
        let t = check_mean_transfer(&spec, &fs).unwrap();
        assert!(t.ordered);
        let holds: Vec<bool> = t.reports.iter().map(|r| r.holds).collect();
        assert_eq!(holds, vec![false, true, true, true, true, true]);
        assert!((t.reports[3].lhs - 2.5 * 4.0 * PI / 3.0).abs() < 1e-12);

        let bad = [RadialProfile::constant(1.0, 0.5).unwrap()];
        assert!(matches!(
            check_mean_transfer(&spec, &bad),
            Err(Error::NonPositiveInput { .. })
        ));
    }

    #[test]
    fn hierarchy_examples() {
        let h = hierarchy_report(&family(0.1)).unwrap();
        assert!((h.c_qs - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.c_b - 1.0 / 135.0).abs() < 1e-16);
        assert!((h.ratio.unwrap() - 45.0).abs() < 45.0 * 1e-12);

        let mut big = family(0.1);
        big.core_radius = 2.0;
        big.f = RadialProfile::constant(1.0, 2.0).unwrap();
        let h = hierarchy_report(&big).unwrap();
        assert!((h.c_qs - 2.0 / 3.0).abs() < 1e-14);
        assert!((h.c_b - 16.0 / 135.0).abs() < 1e-14);

        let mut zero = family(0.1);
        zero.f = RadialProfile::constant(0.0, 1.0).unwrap();
        let h = hierarchy_report(&zero).unwrap();
        assert_eq!((h.c_qs, h.c_b, h.ratio), (0.0, 0.0, None));

        let lin = family(0.1).with_g(RadialProfile::polynomial_everywhere(vec![0.1, 0.1]));
        assert_eq!(hierarchy_report(&lin), Err(Error::NonConstantG));
    }

    #[test]
    fn duality_constant_family() {
        for c in [0.005, 0.01] {
            let d = duality_data(&family(c)).unwrap();
            assert!((d.g1_at_core - 45.0 * c).abs() < 1e-12 * 45.0 * c);
            assert!((d.g2_at_core - 3.0 * c).abs() < 1e-12 * 3.0 * c);
            let reduced = c < 1.0 / 135.0;
            assert_eq!(d.b_condition.holds, reduced);
            assert_eq!(d.qs_f_g1.holds, reduced);
            assert_eq!(d.qs_uc_g2.holds, reduced);
        }
    }
}
