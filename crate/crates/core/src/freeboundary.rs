//! Critical radii of the radial free-boundary problems, the shape functionals
//! `J` and `F` with their radial shape derivatives, scans and sweeps.
//!
//! For a ball core `C = B_R` the free boundary is a sphere `∂B_ρ` and both
//! problems reduce to a scalar equation in `ρ`:
//!
//! * `QS`: `F_qs(ρ) = int_C f - ω ρ^(N-1) g(ρ) = 0`,
//! * `B`:  `Φ(ρ) = (ω ρ^(N-1) sqrt g(ρ))^2 - int_C f · int_{B_ρ} u_ρ = 0`.
//!
//! `Φ = -ω² ρ^(2N-2) ψ` with `ψ = |u'||v'| - g`, so `Φ` and `ψ` share roots.

use serde::{Deserialize, Serialize};

use crate::biharmonic::{self, BiharmonicSolution};
use crate::calculus::{volume_integral, PiecewisePower};
use crate::error::{Error, Result};
use crate::existence::{check_b, check_qs, ConditionReport};
use crate::model::{ProblemSpec, RadialProfile};
use crate::parallel::{self, Execution};
use crate::poisson::{self, PoissonSolution};

/// Grid size of the bracketing scan on `[R, rho_max]`.
pub const BRACKET_SCAN_POINTS: usize = 512;

const MAX_ROOT_ITERATIONS: usize = 400;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Qs,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Functional {
    /// `J(ρ) = int_{B_ρ} g² - int |∇u_ρ|²`.
    J,
    /// `F(ρ) = ½ int u_ρ² - int_{B_ρ} g`.
    F,
    /// The B deficit `Φ`.
    Phi,
    /// The QS deficit `F_qs`.
    Fqs,
    /// The pointwise B deficit `ψ`.
    Psi,
}

impl Functional {
    pub const ALL: [Functional; 5] = [
        Functional::J,
        Functional::F,
        Functional::Phi,
        Functional::Fqs,
        Functional::Psi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::J => "J",
            Functional::F => "F",
            Functional::Phi => "Phi",
            Functional::Fqs => "Fqs",
            Functional::Psi => "psi",
        }
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown functional '{s}' (expected J, F, Phi, Fqs or psi)"
                ))
            })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootMethod {
    /// Plain dichotomy; the reference method.
    #[default]
    Bisection,
    /// Illinois-modified false position.
    Illinois,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSample {
    pub rho: f64,
    pub value: f64,
    pub derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplicityNote {
    /// Sign changes of the deficit on the bracketing grid.
    pub sign_changes: usize,
    pub brackets: Vec<(f64, f64)>,
    /// The deficit vanishes at `ρ = R`; that root is excluded.
    pub tangency_at_core: bool,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassIdentity {
    /// `int_{B_R*} u_R*`.
    pub lhs: f64,
    /// `ω² R*^(2N-2) g(R*) / int_C f`.
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub problem: Problem,
    pub critical_radius: f64,
    /// Deficit at the returned radius.
    pub residual: f64,
    /// Scale the residual is measured against.
    pub scale: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub method: RootMethod,
    /// Mismatch of the pointwise overdetermined condition at `R*`.
    pub pointwise_check: f64,
    pub multiplicity_note: MultiplicityNote,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass_identity: Option<MassIdentity>,
    pub condition: ConditionReport,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveOptions {
    /// Search for B roots even when the sufficient condition fails.
    pub force: bool,
    pub method: RootMethod,
    pub execution: Execution,
}

/// Deficit and functional evaluation with the core integrals computed once.
#[derive(Clone, Debug)]
pub struct Evaluator<'a> {
    spec: &'a ProblemSpec,
    source_mass: f64,
    core_moment: f64,
}

impl<'a> Evaluator<'a> {
    pub fn new(spec: &'a ProblemSpec) -> Result<Self> {
        let source_mass = volume_integral(&spec.f, &spec.core())?;
        let core_moment =
            poisson::solve_profile(&spec.f, spec.dimension, spec.core_radius)?.total_mass;
        Ok(Self {
            spec,
            source_mass,
            core_moment,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    /// `int_C f`.
    pub fn source_mass(&self) -> f64 {
        self.source_mass
    }

    /// `int_C u_C`.
    pub fn core_moment(&self) -> f64 {
        self.core_moment
    }

    /// Magnitude against which values of `functional` are compared.
    pub fn scale(&self, functional: Functional) -> f64 {
        let area = self.spec.core().surface_area();
        let s = match functional {
            Functional::Fqs => self.source_mass.abs(),
            Functional::Phi => (self.source_mass * self.core_moment).abs(),
            Functional::Psi => {
                let edge = self.source_mass * self.core_moment / (area * area);
                edge.abs()
                    .max(self.spec.g.eval(self.spec.core_radius).abs())
            }
            Functional::J | Functional::F => 1.0,
        };
        s.max(f64::MIN_POSITIVE)
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if !(rho >= self.spec.core_radius) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rho = {rho} must satisfy rho >= R = {}",
                self.spec.core_radius
            )));
        }
        Ok(())
    }

    fn solve_u(&self, rho: f64) -> Result<PoissonSolution> {
        poisson::solve_profile(&self.spec.f, self.spec.dimension, rho)
    }

    fn solve_uv(&self, rho: f64) -> Result<BiharmonicSolution> {
        biharmonic::solve_biharmonic_profile(&self.spec.f, self.spec.dimension, rho)
    }

    fn g_interior(&self, rho: f64) -> Result<PiecewisePower> {
        if !self.spec.g.covers(0.0, rho) {
            return Err(Error::GInteriorUndefined {
                rho,
                start: self.spec.g.start(),
            });
        }
        Ok(PiecewisePower::from_profile(&self.spec.g, rho))
    }

    pub fn qs_deficit(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let ball = self.spec.ball(rho);
        Ok(self.source_mass - ball.surface_area() * self.spec.g.eval(rho))
    }

    pub fn b_deficit(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let ball = self.spec.ball(rho);
        let edge = ball.surface_area() * self.spec.g.eval(rho).sqrt();
        Ok(edge * edge - self.source_mass * self.solve_u(rho)?.total_mass)
    }

    pub fn pointwise_deficit(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.solve_uv(rho)?.edge_product - self.spec.g.eval(rho))
    }

    pub fn functional_j(&self, rho: f64) -> Result<FunctionalSample> {
        self.check_rho(rho)?;
        let g = self.g_interior(rho)?;
        let ball = self.spec.ball(rho);
        let u = self.solve_u(rho)?;
        let value = g.mul(&g).volume_integral(&ball)? - u.dirichlet_energy()?;
        let g_rho = self.spec.g.eval(rho);
        let du = u.boundary_gradient;
        Ok(FunctionalSample {
            rho,
            value,
            derivative: ball.surface_area() * (g_rho * g_rho - du * du),
        })
    }

    /// `F` together with the residual of `int u² = int f v`.
    pub fn functional_f_checked(&self, rho: f64) -> Result<(FunctionalSample, f64)> {
        self.check_rho(rho)?;
        let g = self.g_interior(rho)?;
        let ball = self.spec.ball(rho);
        let sol = self.solve_uv(rho)?;
        let source = PiecewisePower::from_profile(&self.spec.f, rho);
        let (uu, fv) = sol.plate_energy_pair(&source)?;
        let g_mass = g.volume_integral(&ball)?;
        let sample = FunctionalSample {
            rho,
            value: 0.5 * uu - g_mass,
            derivative: ball.surface_area() * (sol.edge_product - self.spec.g.eval(rho)),
        };
        Ok((sample, (0.5 * uu - 0.5 * fv).abs()))
    }

    pub fn functional_f(&self, rho: f64) -> Result<FunctionalSample> {
        Ok(self.functional_f_checked(rho)?.0)
    }

    /// Value and analytic `ρ`-derivative of `functional`.
    pub fn sample(&self, functional: Functional, rho: f64) -> Result<FunctionalSample> {
        let spec = self.spec;
        let n = spec.dimension as f64;
        let g = spec.g.eval(rho);
        let dg = spec.g.eval_derivative(rho);
        match functional {
            Functional::J => self.functional_j(rho),
            Functional::F => self.functional_f(rho),
            Functional::Fqs => {
                let area = spec.ball(rho).surface_area();
                Ok(FunctionalSample {
                    rho,
                    value: self.qs_deficit(rho)?,
                    derivative: -area * ((n - 1.0) * g / rho + dg),
                })
            }
            Functional::Phi | Functional::Psi => {
                self.check_rho(rho)?;
                let ball = spec.ball(rho);
                let area = ball.surface_area();
                let sol = self.solve_uv(rho)?;
                // d/dρ int_{B_ρ} u_ρ = |u'(ρ)| |B_ρ| once the source lies inside B_ρ.
                let dmass = sol.shear * ball.volume();
                if functional == Functional::Phi {
                    let value = area * area * g - self.source_mass * sol.u.total_mass;
                    let derivative =
                        area * area * (2.0 * (n - 1.0) * g / rho + dg) - self.source_mass * dmass;
                    Ok(FunctionalSample {
                        rho,
                        value,
                        derivative,
                    })
                } else {
                    let dshear = -(n - 1.0) * sol.shear / rho;
                    let dslope = dmass / area - (n - 1.0) * sol.slope / rho;
                    Ok(FunctionalSample {
                        rho,
                        value: sol.edge_product - g,
                        derivative: dshear * sol.slope + sol.shear * dslope - dg,
                    })
                }
            }
        }
    }
}

pub fn qs_deficit(spec: &ProblemSpec, rho: f64) -> Result<f64> {
    Evaluator::new(spec)?.qs_deficit(rho)
}

pub fn b_deficit(spec: &ProblemSpec, rho: f64) -> Result<f64> {
    Evaluator::new(spec)?.b_deficit(rho)
}

pub fn equivalent_pointwise_deficit(spec: &ProblemSpec, rho: f64) -> Result<f64> {
    Evaluator::new(spec)?.pointwise_deficit(rho)
}

pub fn functional_j(spec: &ProblemSpec, rho: f64) -> Result<FunctionalSample> {
    Evaluator::new(spec)?.functional_j(rho)
}

pub fn functional_f(spec: &ProblemSpec, rho: f64) -> Result<FunctionalSample> {
    Evaluator::new(spec)?.functional_f(rho)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub functional: Functional,
    pub samples: Vec<FunctionalSample>,
    /// Adjacent grid points between which the value changes sign.
    pub sign_changes: Vec<(f64, f64)>,
    /// Grid points where the value vanishes to rounding.
    pub zeros: Vec<f64>,
}

fn sign_of(value: f64, zero_band: f64) -> i8 {
    if value.abs() <= zero_band {
        0
    } else if value > 0.0 {
        1
    } else {
        -1
    }
}

/// Brackets `(ρ_i, ρ_j)` between successive nonzero samples of opposite sign,
/// and the sample points that lie inside the zero band.
fn sign_structure(points: &[(f64, f64)], zero_band: f64) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut brackets = Vec::new();
    let mut zeros = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for &(r, v) in points {
        let s = sign_of(v, zero_band);
        if s == 0 {
            zeros.push(r);
            continue;
        }
        if let Some((r0, s0)) = last {
            if s0 != s {
                brackets.push((r0, r));
            }
        }
        last = Some((r, s));
    }
    (brackets, zeros)
}

fn zero_band(scale: f64) -> f64 {
    64.0 * f64::EPSILON * scale
}

pub fn scan(
    spec: &ProblemSpec,
    functional: Functional,
    rho_from: f64,
    rho_to: f64,
    steps: usize,
    execution: Execution,
) -> Result<ScanTable> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "a scan needs at least 2 grid points, got {steps}"
        )));
    }
    if !(spec.core_radius <= rho_from && rho_from < rho_to && rho_to <= spec.rho_max) {
        return Err(Error::InvalidArgument(format!(
            "scan range [{rho_from}, {rho_to}] must satisfy R <= from < to <= rho_max ({}, {})",
            spec.core_radius, spec.rho_max
        )));
    }
    let eval = Evaluator::new(spec)?;
    let h = (rho_to - rho_from) / (steps - 1) as f64;
    let samples = parallel::map_range(execution, steps, |i| {
        let rho = if i + 1 == steps {
            rho_to
        } else {
            rho_from + h * i as f64
        };
        eval.sample(functional, rho)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let points: Vec<(f64, f64)> = samples.iter().map(|s| (s.rho, s.value)).collect();
    let (sign_changes, zeros) = sign_structure(&points, zero_band(eval.scale(functional)));
    Ok(ScanTable {
        functional,
        samples,
        sign_changes,
        zeros,
    })
}

/// Outcome of a bracketed root search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracketed {
    pub root: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Root of `f` in `[lo, hi]` given values of opposite sign at the ends.
/// Stops when the bracket is below `x_tol` or `|f| <= f_tol`.
pub fn find_root<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    x_tol: f64,
    f_tol: f64,
    method: RootMethod,
) -> Result<Bracketed>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa == 0.0 {
        return Ok(Bracketed {
            root: a,
            value: 0.0,
            bracket: (a, a),
            iterations: 0,
        });
    }
    if fb == 0.0 {
        return Ok(Bracketed {
            root: b,
            value: 0.0,
            bracket: (b, b),
            iterations: 0,
        });
    }
    if fa.signum() == fb.signum() {
        return Err(Error::BracketNotFound {
            lo,
            hi,
            value_at_rho_max: fb,
        });
    }
    let mut side = 0i8;
    let mut iterations = 0;
    let (mut best, mut best_value) = if fa.abs() < fb.abs() {
        (a, fa)
    } else {
        (b, fb)
    };
    while iterations < MAX_ROOT_ITERATIONS && (b - a) > x_tol && best_value.abs() > f_tol {
        iterations += 1;
        let c = match method {
            RootMethod::Bisection => 0.5 * (a + b),
            RootMethod::Illinois => {
                let c = (a * fb - b * fa) / (fb - fa);
                if c > a && c < b {
                    c
                } else {
                    0.5 * (a + b)
                }
            }
        };
        if c <= a || c >= b {
            break;
        }
        let fc = f(c)?;
        if fc.abs() < best_value.abs() {
            best = c;
            best_value = fc;
        }
        if fc == 0.0 {
            a = c;
            b = c;
            break;
        }
        if fc.signum() == fa.signum() {
            a = c;
            fa = fc;
            if method == RootMethod::Illinois && side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            fb = fc;
            if method == RootMethod::Illinois && side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    Ok(Bracketed {
        root: best,
        value: best_value,
        bracket: (a, b),
        iterations,
    })
}

fn deficit_functional(problem: Problem) -> Functional {
    match problem {
        Problem::Qs => Functional::Fqs,
        Problem::B => Functional::Phi,
    }
}

fn value_of(eval: &Evaluator<'_>, functional: Functional, rho: f64) -> Result<f64> {
    match functional {
        Functional::Fqs => eval.qs_deficit(rho),
        Functional::Phi => eval.b_deficit(rho),
        Functional::Psi => eval.pointwise_deficit(rho),
        other => Ok(eval.sample(other, rho)?.value),
    }
}

/// Smallest root of `functional` on `(R, rho_max]`, bracketed by a
/// [`BRACKET_SCAN_POINTS`]-point scan; a root at `ρ = R` is excluded.
pub fn first_root(
    eval: &Evaluator<'_>,
    functional: Functional,
    method: RootMethod,
    execution: Execution,
) -> Result<(Bracketed, MultiplicityNote)> {
    let spec = eval.spec();
    let (lo, hi) = (spec.core_radius, spec.rho_max);
    let n = BRACKET_SCAN_POINTS;
    let step = (hi - lo) / (n - 1) as f64;
    let points = parallel::map_range(execution, n, |i| {
        let rho = if i + 1 == n { hi } else { lo + step * i as f64 };
        value_of(eval, functional, rho).map(|v| (rho, v))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let scale = eval.scale(functional);
    let (brackets, zeros) = sign_structure(&points, zero_band(scale));
    let tangency_at_core = zeros.first() == Some(&lo);
    let interior_zeros: Vec<f64> = zeros.iter().copied().filter(|&z| z > lo).collect();

    let mut text = format!(
        "{} sign change(s) of {} on [{lo}, {hi}] over {n} grid points",
        brackets.len(),
        functional.name()
    );
    if tangency_at_core {
        text.push_str(&format!(
            "; {} vanishes at rho = R = {lo}, which is excluded since R* > R is required",
            functional.name()
        ));
    }
    if brackets.len() > 1 {
        text.push_str("; the critical radius is not unique, the smallest root is returned");
    }
    let note = MultiplicityNote {
        sign_changes: brackets.len(),
        brackets: brackets.clone(),
        tangency_at_core,
        text,
    };

    let first_bracket = brackets.first().copied();
    let first_zero = interior_zeros.first().copied();
    let x_tol = 1e-3 * spec.tolerances.root_tol * hi.max(1.0);
    let f_tol = 1e-3 * spec.tolerances.root_tol * scale;
    let found = match (first_bracket, first_zero) {
        (Some((a, _)), Some(z)) if z < a => Bracketed {
            root: z,
            value: value_of(eval, functional, z)?,
            bracket: (z, z),
            iterations: 0,
        },
        (Some((a, b)), _) => find_root(
            |r| value_of(eval, functional, r),
            a,
            b,
            x_tol,
            f_tol,
            method,
        )?,
        (None, Some(z)) => Bracketed {
            root: z,
            value: value_of(eval, functional, z)?,
            bracket: (z, z),
            iterations: 0,
        },
        (None, None) => {
            return Err(Error::BracketNotFound {
                lo,
                hi,
                value_at_rho_max: points.last().map_or(f64::NAN, |p| p.1),
            })
        }
    };
    Ok((found, note))
}

fn certificate_error(report: &ConditionReport, explanation: &str) -> Error {
    Error::NoSolutionCertificate {
        lhs: report.lhs,
        rhs: report.rhs,
        margin: report.margin,
        explanation: explanation.to_string(),
    }
}

fn verify_root(eval: &Evaluator<'_>, functional: Functional, found: &Bracketed) -> Result<f64> {
    let scale = eval.scale(functional);
    let tol = eval.spec().tolerances.root_tol;
    if !(found.value.abs() < tol * scale) {
        return Err(Error::Verification(format!(
            "deficit {} at rho = {} exceeds root_tol * scale = {}",
            found.value,
            found.root,
            tol * scale
        )));
    }
    Ok(scale)
}

pub fn solve_qs(spec: &ProblemSpec, options: SolveOptions) -> Result<RootResult> {
    let condition = check_qs(spec)?;
    if !condition.holds {
        return Err(certificate_error(
            &condition,
            "int_C f must exceed int_dC g for a radial solution",
        ));
    }
    let eval = Evaluator::new(spec)?;
    let (found, note) = first_root(&eval, Functional::Fqs, options.method, options.execution)?;
    let scale = verify_root(&eval, Functional::Fqs, &found)?;
    let r_star = found.root;
    let u = poisson::solve_profile(&spec.f, spec.dimension, r_star)?;
    let g = spec.g.eval(r_star);
    let pointwise_check = (u.boundary_gradient - g).abs();
    if !(pointwise_check < spec.tolerances.identity_tol * g.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::Verification(format!(
            "||u'(R*)| - g(R*)| = {pointwise_check} at R* = {r_star}"
        )));
    }
    Ok(RootResult {
        problem: Problem::Qs,
        critical_radius: r_star,
        residual: found.value,
        scale,
        bracket: found.bracket,
        iterations: found.iterations,
        method: options.method,
        pointwise_check,
        multiplicity_note: note,
        mass_identity: None,
        condition,
    })
}

pub fn solve_b(spec: &ProblemSpec, options: SolveOptions) -> Result<RootResult> {
    let condition = check_b(spec)?;
    if !condition.holds && !options.force {
        return Err(certificate_error(
            &condition,
            "the sufficient B condition fails; use force to search for roots anyway",
        ));
    }
    let eval = Evaluator::new(spec)?;
    let (found, note) = first_root(&eval, Functional::Phi, options.method, options.execution)?;
    let scale = verify_root(&eval, Functional::Phi, &found)?;
    let r_star = found.root;
    let sol = biharmonic::solve_biharmonic_profile(&spec.f, spec.dimension, r_star)?;
    let g = spec.g.eval(r_star);
    let pointwise_check = (sol.edge_product - g).abs();
    if !(pointwise_check < spec.tolerances.identity_tol * g.abs().max(f64::MIN_POSITIVE)) {
        return Err(Error::Verification(format!(
            "||u'||v'| - g| = {pointwise_check} at R* = {r_star}"
        )));
    }
    let area = spec.ball(r_star).surface_area();
    let lhs = sol.u.total_mass;
    let rhs = area * area * g / eval.source_mass();
    let mass_identity = MassIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs(),
    };
    if !(mass_identity.residual < spec.tolerances.identity_tol * lhs.abs()) {
        return Err(Error::Verification(format!(
            "mass identity int u = {lhs} vs {rhs} at R* = {r_star}"
        )));
    }
    Ok(RootResult {
        problem: Problem::B,
        critical_radius: r_star,
        residual: found.value,
        scale,
        bracket: found.bracket,
        iterations: found.iterations,
        method: options.method,
        pointwise_check,
        multiplicity_note: note,
        mass_identity: Some(mass_identity),
        condition,
    })
}

pub fn solve(spec: &ProblemSpec, problem: Problem, options: SolveOptions) -> Result<RootResult> {
    match problem {
        Problem::Qs => solve_qs(spec, options),
        Problem::B => solve_b(spec, options),
    }
}

/// Scalar knob varied by [`sweep_parameter`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Knob {
    /// Replace `g` by the constant given by the knob value.
    GConstant,
    /// Multiply `g` by the knob value.
    GScale,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub margin: Option<f64>,
    pub critical_radius: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub problem: Problem,
    pub knob: Knob,
    pub rows: Vec<SweepRow>,
    /// Largest `|ΔR*|` between adjacent solved rows.
    pub max_step: Option<f64>,
    /// Largest `|ΔR*| / |Δvalue|` between adjacent solved rows.
    pub modulus: Option<f64>,
}

fn instantiate(template: &ProblemSpec, knob: Knob, value: f64) -> Result<ProblemSpec> {
    let g = match knob {
        Knob::GConstant => {
            if template.g.start() > 0.0 {
                RadialProfile::new(
                    vec![crate::model::Segment::new(
                        template.g.start(),
                        template.rho_max,
                        vec![value],
                    )],
                    true,
                )?
            } else {
                RadialProfile::constant_everywhere(value)
            }
        }
        Knob::GScale => template.g.scaled(value),
    };
    let spec = template.with_g(g);
    spec.validate()?;
    Ok(spec)
}

fn sweep_row(
    template: &ProblemSpec,
    problem: Problem,
    knob: Knob,
    value: f64,
    options: SolveOptions,
) -> SweepRow {
    let mut row = SweepRow {
        value,
        margin: None,
        critical_radius: None,
        error: None,
    };
    let spec = match instantiate(template, knob, value) {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    let report = match problem {
        Problem::Qs => check_qs(&spec),
        Problem::B => check_b(&spec),
    };
    match report {
        Ok(r) => row.margin = Some(r.margin),
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    }
    let inner = SolveOptions {
        execution: Execution::Sequential,
        ..options
    };
    match solve(&spec, problem, inner) {
        Ok(r) => row.critical_radius = Some(r.critical_radius),
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}

/// Critical radius as a function of a scalar knob; a failing row records its
/// error and the sweep continues.
pub fn sweep_parameter(
    template: &ProblemSpec,
    problem: Problem,
    knob: Knob,
    values: &[f64],
    options: SolveOptions,
) -> SweepTable {
    let rows = parallel::map(options.execution, values, |&v| {
        sweep_row(template, problem, knob, v, options)
    });
    let mut max_step: Option<f64> = None;
    let mut modulus: Option<f64> = None;
    for w in rows.windows(2) {
        if let (Some(a), Some(b)) = (w[0].critical_radius, w[1].critical_radius) {
            let d = (b - a).abs();
            max_step = Some(max_step.map_or(d, |m| m.max(d)));
            let dv = (w[1].value - w[0].value).abs();
            if dv > 0.0 {
                let l = d / dv;
                modulus = Some(modulus.map_or(l, |m| m.max(l)));
            }
        }
    }
    SweepTable {
        problem,
        knob,
        rows,
        max_step,
        modulus,
    }
}

/// Problem-generic view used by reports: deficit at `ρ` for `problem`.
pub fn deficit(spec: &ProblemSpec, problem: Problem, rho: f64) -> Result<f64> {
    let eval = Evaluator::new(spec)?;
    value_of(&eval, deficit_functional(problem), rho)
}
