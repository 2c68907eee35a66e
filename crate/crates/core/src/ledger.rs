//! Numerical checks of integral identities and inequalities on radial
//! instances. Each check records both sides, a residual and a verdict.

use serde::{Deserialize, Serialize};

use crate::biharmonic;
use crate::calculus::{surface_integral_of_value, volume_integral, PiecewisePower};
use crate::error::{Error, Result};
use crate::existence::{duality_data, Means, MEAN_NAMES};
use crate::model::{BallGeometry, ProblemSpec, RadialProfile};
use crate::poisson;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckId {
    Green,
    Energy,
    Pohozaev,
    Reilly,
    CauchyProduct,
    Duality,
    IteratedGreen,
    MeansOrder,
    EqualityCase,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// `lhs = rhs` is expected.
    Identity,
    /// `lhs >= rhs` is expected.
    Inequality,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Equal,
    Greater,
    Less,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub check_id: CheckId,
    pub kind: CheckKind,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Observed relation between the sides, with ties inside the tolerance.
    pub relation: Relation,
    pub verdict: Verdict,
    #[serde(default)]
    pub notes: Vec<String>,
}

fn tolerance_band(lhs: f64, rhs: f64, tol: f64) -> f64 {
    tol * 1f64.max(lhs.abs()).max(rhs.abs())
}

fn relation_of(lhs: f64, rhs: f64, tol: f64) -> Relation {
    let d = lhs - rhs;
    if d.abs() < tolerance_band(lhs, rhs, tol) {
        Relation::Equal
    } else if d > 0.0 {
        Relation::Greater
    } else {
        Relation::Less
    }
}

impl IdentityCheck {
    /// `lhs = rhs`: passes when `|lhs - rhs| < tol · max(1, |lhs|, |rhs|)`.
    pub fn identity(check_id: CheckId, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = (lhs - rhs).abs();
        let relation = relation_of(lhs, rhs, tol);
        Self {
            check_id,
            kind: CheckKind::Identity,
            lhs,
            rhs,
            residual,
            relation,
            verdict: if relation == Relation::Equal {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            notes: Vec::new(),
        }
    }

    /// `lhs >= rhs`: passes unless `lhs` falls below `rhs` by more than the tolerance.
    pub fn inequality(check_id: CheckId, lhs: f64, rhs: f64, tol: f64) -> Self {
        let relation = relation_of(lhs, rhs, tol);
        Self {
            check_id,
            kind: CheckKind::Inequality,
            lhs,
            rhs,
            residual: (lhs - rhs).abs(),
            relation,
            verdict: if relation == Relation::Less {
                Verdict::Fail
            } else {
                Verdict::Pass
            },
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// `int_{B_ρ} f = int_{∂B_ρ} |∇u|` for `-Δu = f`, `u = 0` on `∂B_ρ`.
pub fn check_green_profile(
    f: &RadialProfile,
    dimension: usize,
    rho: f64,
    tol: f64,
) -> Result<IdentityCheck> {
    let sol = poisson::solve_profile(f, dimension, rho)?;
    let geom = sol.geometry();
    let lhs = volume_integral(f, &geom)?;
    let rhs = surface_integral_of_value(sol.boundary_gradient, &geom);
    Ok(IdentityCheck::identity(CheckId::Green, lhs, rhs, tol)
        .note(format!("rho = {rho}, N = {dimension}")))
}

pub fn check_green(spec: &ProblemSpec, rho: f64) -> Result<IdentityCheck> {
    check_green_profile(&spec.f, spec.dimension, rho, spec.tolerances.identity_tol)
}

/// `int |∇u|² = int f u`.
pub fn check_energy(spec: &ProblemSpec, rho: f64) -> Result<IdentityCheck> {
    let sol = poisson::solve_profile(&spec.f, spec.dimension, rho)?;
    let source = PiecewisePower::from_profile(&spec.f, rho);
    let lhs = sol.dirichlet_energy()?;
    let rhs = sol.weighted_mass(&source)?;
    Ok(
        IdentityCheck::identity(CheckId::Energy, lhs, rhs, spec.tolerances.identity_tol)
            .note("Dirichlet energy against source work"),
    )
}

/// `int u² = int f v` for the Navier plate `-Δu = f`, `-Δv = u`.
pub fn check_plate_energy(spec: &ProblemSpec, rho: f64) -> Result<IdentityCheck> {
    let source = PiecewisePower::from_profile(&spec.f, rho);
    let sol = biharmonic::solve_biharmonic(&source, spec.dimension, rho)?;
    let (lhs, rhs) = sol.plate_energy_pair(&source)?;
    Ok(
        IdentityCheck::identity(CheckId::Energy, lhs, rhs, spec.tolerances.identity_tol)
            .note("plate energy: bending moment squared against load times deflection"),
    )
}

fn torsion(dimension: usize, rho: f64) -> Result<poisson::PoissonSolution> {
    Ok(poisson::iterate(dimension, rho, 1)?.remove(0))
}

/// Pohozaev identity for the torsion function on `B_ρ`:
/// `(N-2)/2 int |∇u|² = N int u - ½ int_{∂B_ρ} |∇u|² (x·ν)`.
pub fn check_pohozaev(rho: f64, dimension: usize, tol: f64) -> Result<IdentityCheck> {
    if dimension < 3 {
        return Err(Error::UnsupportedDimension(dimension));
    }
    let sol = torsion(dimension, rho)?;
    let geom = sol.geometry();
    let n = dimension as f64;
    let grad = sol.dirichlet_energy()?;
    let lhs = 0.5 * (n - 2.0) * grad;
    let bulk = n * sol.total_mass;
    let du = sol.boundary_gradient;
    let boundary = 0.5 * surface_integral_of_value(du * du * rho, &geom);
    Ok(
        IdentityCheck::identity(CheckId::Pohozaev, lhs, bulk - boundary, tol).note(format!(
            "torsion on B_{rho}, N = {dimension}: N int u = {bulk:.12}, boundary term = {boundary:.12}"
        )),
    )
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReillyOrientation {
    /// `int ((Δu)² - |∇²u|²) = int_{∂Ω} H |∇u|²`, which balances on balls.
    #[default]
    Corrected,
    /// `int (|∇²u|² - (Δu)²) = int_{∂Ω} H |∇u|²`.
    Printed,
}

/// Reilly-type identity for the torsion function on `B_ρ` with
/// `H = (N-1)/ρ`. The notes record the residual of both orientations.
pub fn check_reilly(
    rho: f64,
    dimension: usize,
    orientation: ReillyOrientation,
    tol: f64,
) -> Result<IdentityCheck> {
    let sol = torsion(dimension, rho)?;
    let geom = sol.geometry();
    let n = dimension as f64;
    let d2 = sol.du.derivative();
    let d1_over_r = sol.du.mul_power(-1);
    let lap = d2.add(&d1_over_r.scale(n - 1.0));
    let hess = d2.mul(&d2).add(&d1_over_r.mul(&d1_over_r).scale(n - 1.0));
    let bulk = lap
        .mul(&lap)
        .add(&hess.scale(-1.0))
        .volume_integral(&geom)?;
    let h = (n - 1.0) / rho;
    let du = sol.boundary_gradient;
    let boundary = surface_integral_of_value(h * du * du, &geom);
    let corrected = (bulk - boundary).abs();
    let printed = (-bulk - boundary).abs();
    let lhs = match orientation {
        ReillyOrientation::Corrected => bulk,
        ReillyOrientation::Printed => -bulk,
    };
    let balancing = if corrected <= printed {
        "int ((Δu)^2 - |∇²u|^2) = int H |∇u|^2"
    } else {
        "int (|∇²u|^2 - (Δu)^2) = int H |∇u|^2"
    };
    Ok(IdentityCheck::identity(CheckId::Reilly, lhs, boundary, tol)
        .note(format!("mean curvature H = (N-1)/rho = {h}"))
        .note(format!(
            "residuals: corrected orientation {corrected:.3e}, printed orientation {printed:.3e}"
        ))
        .note(format!("balancing orientation: {balancing}")))
}

/// `int_C f₁² >= M int_{∂C} |∇v_C|` with `M = int f₁f₂ / int f₂²` and
/// `-Δv_C = f₁ f₂`; equality exactly for proportional inputs.
pub fn check_cauchy_product(
    f1: &RadialProfile,
    f2: &RadialProfile,
    radius: f64,
    dimension: usize,
    tol: f64,
) -> Result<IdentityCheck> {
    for f in [f1, f2] {
        if let Some((r, value)) = f.find_negative(0.0, radius) {
            return Err(Error::NonPositiveInput { r, value });
        }
    }
    let geom = BallGeometry::new(dimension, radius)?;
    let p1 = PiecewisePower::from_profile(f1, radius);
    let p2 = PiecewisePower::from_profile(f2, radius);
    let f1f1 = p1.mul(&p1).volume_integral(&geom)?;
    let f2f2 = p2.mul(&p2).volume_integral(&geom)?;
    if !(f2f2 > 0.0) {
        return Err(Error::InvalidArgument(
            "f2 vanishes identically on C".into(),
        ));
    }
    let product = p1.mul(&p2);
    let f1f2 = product.volume_integral(&geom)?;
    let m = f1f2 / f2f2;
    let v = poisson::solve(&product, dimension, radius)?;
    let rhs = m * surface_integral_of_value(v.boundary_gradient, &geom);
    let check = IdentityCheck::inequality(CheckId::CauchyProduct, f1f1, rhs, tol);
    let class = match check.relation {
        Relation::Equal => "equality (proportional inputs)",
        Relation::Greater => "strict (inputs not proportional)",
        Relation::Less => "violated",
    };
    Ok(check
        .note(format!("M = {m:.12}, int_C f1 f2 = {f1f2:.12}"))
        .note(class))
}

/// Implications `B(f, g) ⇒ QS(f, g₁)` and `B(f, g) ⇒ QS(u_C, g₂)` for the
/// dual boundary data.
pub fn check_duality(spec: &ProblemSpec) -> Result<[IdentityCheck; 2]> {
    let d = duality_data(spec)?;
    let antecedent = d.b_condition.holds;
    let tol = spec.tolerances.identity_tol;
    let build = |report: &crate::existence::ConditionReport, label: &str, factor: f64| {
        let mut check = IdentityCheck::inequality(CheckId::Duality, report.lhs, report.rhs, tol);
        check.relation = relation_of(report.lhs, report.rhs, 0.0);
        let consequent = report.holds;
        check.verdict = if !antecedent || consequent {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        let mut check = check.note(format!("{label}: multiplier {factor:.12} on sqrt g"));
        check = if antecedent {
            check.note(format!(
                "B condition holds; implied QS condition {}",
                if consequent { "holds" } else { "fails" }
            ))
        } else {
            check.note("B condition fails: implication holds vacuously")
        };
        check
    };
    Ok([
        build(
            &d.qs_f_g1,
            "g_1 = Φ_sqrt(g)(C) / T(C, u_C) sqrt g",
            d.g1_factor,
        ),
        build(
            &d.qs_uc_g2,
            "g_2 = Φ_sqrt(g)(C) / T(C, f) sqrt g",
            d.g2_factor,
        ),
    ])
}

/// Iterated Green formula on `B_ρ` for a source defined on the whole ball:
/// `int f = Σ_{k<n} (-1)^k int_{∂B_ρ} |∇u_k| Δ^k f + (-1)^n int u_{n-1} Δ^n f`,
/// with `-Δu_0 = 1` and `-Δu_k = u_{k-1}`.
pub fn check_iterated_green(
    f: &RadialProfile,
    dimension: usize,
    rho: f64,
    n: usize,
    tol: f64,
) -> Result<IdentityCheck> {
    if !f.covers(0.0, rho) {
        return Err(Error::InvalidArgument(format!(
            "the source must be defined on all of [0, {rho}]"
        )));
    }
    let chain = poisson::iterate(dimension, rho, n)?;
    let geom = BallGeometry::new(dimension, rho)?;
    let lhs = volume_integral(f, &geom)?;
    let mut lap = f.clone();
    let mut rhs = 0.0;
    let mut sign = 1.0;
    for u in &chain {
        rhs += sign * surface_integral_of_value(u.boundary_gradient * lap.eval(rho), &geom);
        lap = lap.radial_laplacian(dimension)?;
        sign = -sign;
    }
    let last = chain.last().expect("n >= 1");
    let tail = last.weighted_mass(&PiecewisePower::from_profile(&lap, rho))?;
    rhs += sign * tail;
    Ok(
        IdentityCheck::identity(CheckId::IteratedGreen, lhs, rhs, tol)
            .note(format!("n = {n}, remainder term {:.12}", sign * tail)),
    )
}

/// `[Φ_√g(C)]² <= int_C f · int_C u_C`, with equality iff
/// `g(R) = |∇u_C(R)| |∇v_C(R)|`. The residual measures the exact
/// decomposition `lhs - rhs = |∂C|² (g(R) - |u_C'||v_C'|)`.
pub fn check_equality_case(spec: &ProblemSpec) -> Result<IdentityCheck> {
    let core = spec.core();
    let area = core.surface_area();
    let g = spec.g.eval(spec.core_radius);
    let lhs = (area * g.sqrt()).powi(2);
    let sol = biharmonic::solve_biharmonic_profile(&spec.f, spec.dimension, spec.core_radius)?;
    let load = volume_integral(&spec.f, &core)?;
    let rhs = load * sol.u.total_mass;
    let tol = spec.tolerances.identity_tol;
    let decomposition = area * area * (g - sol.edge_product);
    let mut check = IdentityCheck::identity(CheckId::EqualityCase, lhs - rhs, decomposition, tol);
    check.lhs = lhs;
    check.rhs = rhs;
    check.relation = relation_of(lhs, rhs, tol);
    let class = match check.relation {
        Relation::Equal => "equality: g(R) = |∇u_C(R)||∇v_C(R)|",
        Relation::Less => "strict: B condition holds",
        Relation::Greater => "reversed: B condition fails",
    };
    Ok(check.note(class).note(format!(
        "edge product at R: {:.12}, g(R) = {g:.12}",
        sol.edge_product
    )))
}

/// The six pointwise means of positive numbers are ordered
/// `min <= H <= G <= A <= Q <= max`.
pub fn check_means_order(values: &[f64], tol: f64) -> Result<IdentityCheck> {
    let means = Means::of(values)?;
    let violation = means.order_violation();
    let mut check = IdentityCheck::inequality(CheckId::MeansOrder, -violation, 0.0, tol);
    check.residual = violation;
    let listing = MEAN_NAMES
        .iter()
        .zip(means.as_array())
        .map(|(name, v)| format!("{name} = {v:.12}"))
        .collect::<Vec<_>>()
        .join(", ");
    Ok(check.note(listing))
}
