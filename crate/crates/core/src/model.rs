//! Radial data and ball geometry.
//!
//! Source terms `f` and boundary data `g` are radial and piecewise
//! polynomial in `r`. Every closed-form quantity downstream (volume and
//! surface integrals, nested Poisson quadratures) stays exact on this class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of sample points per segment used for sign checks.
const SAMPLES_PER_SEGMENT: usize = 64;

/// One polynomial piece on `[lo, hi]`, coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl Segment {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        Self { lo, hi, coeffs }
    }

    /// Horner evaluation of the segment polynomial (no range check).
    pub fn eval(&self, r: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * r + c)
    }

    pub fn eval_derivative(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, &c)| acc * r + k as f64 * c)
    }
}

/// A piecewise polynomial radial function `r -> p(r)`.
///
/// Segments are contiguous and ordered. Past the last knot the profile is
/// either zero or, when `extend_last` is set, the last polynomial continued
/// to infinity (the usual choice for boundary data `g`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    segments: Vec<Segment>,
    extend_last: bool,
}

impl RadialProfile {
    pub fn new(segments: Vec<Segment>, extend_last: bool) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments".into()));
        }
        if !(segments[0].lo >= 0.0) {
            return Err(Error::InvalidProfile(format!(
                "first segment starts at {} < 0",
                segments[0].lo
            )));
        }
        for (i, s) in segments.iter().enumerate() {
            if !(s.lo.is_finite() && s.hi.is_finite() && s.lo < s.hi) {
                return Err(Error::InvalidProfile(format!(
                    "segment {i} has invalid bounds [{}, {}]",
                    s.lo, s.hi
                )));
            }
            if s.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProfile(format!(
                    "segment {i} has non-finite coefficients"
                )));
            }
            if i > 0 && segments[i - 1].hi != s.lo {
                return Err(Error::InvalidProfile(format!(
                    "segments {} and {i} are not contiguous ({} != {})",
                    i - 1,
                    segments[i - 1].hi,
                    s.lo
                )));
            }
        }
        Ok(Self {
            segments,
            extend_last,
        })
    }

    /// `c` on `[0, support]`, zero beyond.
    pub fn constant(c: f64, support: f64) -> Result<Self> {
        Self::polynomial(vec![c], support)
    }

    /// `c` for every `r >= 0`.
    pub fn constant_everywhere(c: f64) -> Self {
        Self::polynomial_everywhere(vec![c])
    }

    /// Single polynomial on `[0, support]`, zero beyond.
    pub fn polynomial(coeffs: Vec<f64>, support: f64) -> Result<Self> {
        Self::new(vec![Segment::new(0.0, support, coeffs)], false)
    }

    /// Single polynomial on `[0, inf)`.
    pub fn polynomial_everywhere(coeffs: Vec<f64>) -> Self {
        Self {
            segments: vec![Segment::new(0.0, 1.0, coeffs)],
            extend_last: true,
        }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn extend_last(&self) -> bool {
        self.extend_last
    }

    /// First radius covered by the profile.
    pub fn start(&self) -> f64 {
        self.segments[0].lo
    }

    /// Last knot.
    pub fn end(&self) -> f64 {
        self.segments[self.segments.len() - 1].hi
    }

    /// Radius beyond which the profile vanishes (infinite when extended).
    pub fn support_radius(&self) -> f64 {
        if self.extend_last {
            f64::INFINITY
        } else {
            self.end()
        }
    }

    /// True when the profile is defined on all of `[a, b]`.
    pub fn covers(&self, a: f64, b: f64) -> bool {
        self.start() <= a && (self.extend_last || b <= self.end())
    }

    fn segment_at(&self, r: f64) -> Option<&Segment> {
        if r < self.start() {
            return None;
        }
        let last = self.segments.len() - 1;
        if r >= self.end() {
            return if r == self.end() || self.extend_last {
                Some(&self.segments[last])
            } else {
                None
            };
        }
        let idx = self.segments.partition_point(|s| s.hi <= r);
        self.segments.get(idx)
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.segment_at(r).map_or(0.0, |s| s.eval(r))
    }

    pub fn eval_derivative(&self, r: f64) -> f64 {
        self.segment_at(r).map_or(0.0, |s| s.eval_derivative(r))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let segments = self
            .segments
            .iter()
            .map(|s| Segment::new(s.lo, s.hi, s.coeffs.iter().map(|c| c * factor).collect()))
            .collect();
        Self {
            segments,
            extend_last: self.extend_last,
        }
    }

    /// Sample radii in `[a, b]`: every knot inside plus a uniform grid per segment.
    pub fn sample_points(&self, a: f64, b: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        let mut knots: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.lo, s.hi])
            .filter(|&k| k > a && k < b)
            .collect();
        knots.push(a);
        knots.push(b);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        for w in knots.windows(2) {
            for i in 0..=SAMPLES_PER_SEGMENT {
                pts.push(w[0] + (w[1] - w[0]) * i as f64 / SAMPLES_PER_SEGMENT as f64);
            }
        }
        pts
    }

    /// First sample point in `[a, b]` where the profile is negative.
    pub fn find_negative(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        self.sample_points(a, b)
            .into_iter()
            .map(|r| (r, self.eval(r)))
            .find(|&(_, v)| v < 0.0)
    }

    /// First sample point in `[a, b]` where the profile is not strictly positive.
    pub fn find_non_positive(&self, a: f64, b: f64) -> Option<(f64, f64)> {
        self.sample_points(a, b)
            .into_iter()
            .map(|r| (r, self.eval(r)))
            .find(|&(_, v)| !(v > 0.0))
    }

    /// `Some(c)` when the profile equals the constant `c` on `[a, inf)` (or up
    /// to its end when not extended).
    pub fn constant_from(&self, a: f64) -> Option<f64> {
        let mut value = None;
        let last = self.segments.len() - 1;
        for s in self
            .segments
            .iter()
            .enumerate()
            .filter(|&(i, s)| s.hi > a || (i == last && self.extend_last))
            .map(|(_, s)| s)
        {
            if s.coeffs.iter().skip(1).any(|&c| c != 0.0) {
                return None;
            }
            let c = s.coeffs.first().copied().unwrap_or(0.0);
            match value {
                None => value = Some(c),
                Some(v) if v != c => return None,
                _ => {}
            }
        }
        value
    }

    /// Radial Laplacian `p'' + (N-1) p'/r`, segment by segment.
    ///
    /// For `p = sum a_k r^k` this is `sum k (k+N-2) a_k r^(k-2)`; the linear
    /// coefficient produces `(N-1) a_1 / r`, which is rejected.
    pub fn radial_laplacian(&self, dimension: usize) -> Result<Self> {
        let n = dimension as f64;
        let mut segments = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            if s.coeffs.get(1).is_some_and(|&a1| a1 != 0.0) {
                return Err(if s.lo == 0.0 {
                    Error::NonSmoothAtKnot { lo: s.lo, hi: s.hi }
                } else {
                    Error::NonPolynomial { lo: s.lo, hi: s.hi }
                });
            }
            let coeffs: Vec<f64> = (2..s.coeffs.len())
                .map(|k| {
                    let kf = k as f64;
                    kf * (kf + n - 2.0) * s.coeffs[k]
                })
                .collect();
            let coeffs = if coeffs.is_empty() { vec![0.0] } else { coeffs };
            segments.push(Segment::new(s.lo, s.hi, coeffs));
        }
        Ok(Self {
            segments,
            extend_last: self.extend_last,
        })
    }
}

/// `Gamma(n/2)` for a positive integer `n`, from `Gamma(1) = 1`,
/// `Gamma(1/2) = sqrt(pi)` and `Gamma(x+1) = x Gamma(x)`.
pub fn gamma_half_integer(n: usize) -> f64 {
    assert!(n > 0, "Gamma(0) is undefined");
    let (mut x, mut value) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (0.5, std::f64::consts::PI.sqrt())
    };
    let target = n as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Surface area of the unit sphere in `R^N`: `2 pi^(N/2) / Gamma(N/2)`.
pub fn unit_sphere_area(dimension: usize) -> f64 {
    let n = dimension as f64;
    2.0 * std::f64::consts::PI.powf(n / 2.0) / gamma_half_integer(dimension)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallGeometry {
    pub dimension: usize,
    pub radius: f64,
}

impl BallGeometry {
    pub fn new(dimension: usize, radius: f64) -> Result<Self> {
        if dimension < 2 {
            return Err(Error::UnsupportedDimension(dimension));
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Self { dimension, radius })
    }

    pub fn omega(&self) -> f64 {
        unit_sphere_area(self.dimension)
    }

    pub fn surface_area(&self) -> f64 {
        self.omega() * self.radius.powi(self.dimension as i32 - 1)
    }

    pub fn volume(&self) -> f64 {
        self.omega() * self.radius.powi(self.dimension as i32) / self.dimension as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub quad_tol: f64,
    pub root_tol: f64,
    pub identity_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_tol: 1e-12,
            root_tol: 1e-10,
            identity_tol: 1e-10,
        }
    }
}

/// Dimension, core ball `C = B_R`, source `f`, boundary data `g`.
///
/// Fields are public so degenerate instances (for example `f = 0`) can be
/// assembled directly; `new` enforces the full set of constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub dimension: usize,
    pub core_radius: f64,
    pub f: RadialProfile,
    pub g: RadialProfile,
    pub tolerances: Tolerances,
    pub rho_max: f64,
}

impl ProblemSpec {
    pub fn new(
        dimension: usize,
        core_radius: f64,
        f: RadialProfile,
        g: RadialProfile,
        rho_max: f64,
        tolerances: Tolerances,
    ) -> Result<Self> {
        let spec = Self {
            dimension,
            core_radius,
            f,
            g,
            tolerances,
            rho_max,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// The `N = 3`, `C = B_1`, `f = 1`, `g = c` family.
    pub fn unit_ball_constant(c: f64) -> Self {
        Self {
            dimension: 3,
            core_radius: 1.0,
            f: RadialProfile::constant(1.0, 1.0).expect("valid constant profile"),
            g: RadialProfile::constant_everywhere(c),
            tolerances: Tolerances::default(),
            rho_max: 5.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        if self.dimension < 2 {
            return Err(Error::UnsupportedDimension(self.dimension));
        }
        if !(self.core_radius > 0.0 && self.core_radius.is_finite()) {
            return bad(format!(
                "core_radius must be positive, got {}",
                self.core_radius
            ));
        }
        if !(self.rho_max > self.core_radius && self.rho_max.is_finite()) {
            return bad(format!(
                "rho_max ({}) must exceed core_radius ({})",
                self.rho_max, self.core_radius
            ));
        }
        if self.f.start() != 0.0 {
            return bad("f must start at r = 0".into());
        }
        if self.f.support_radius() > self.core_radius {
            return bad(format!(
                "support of f ({}) exceeds core_radius ({})",
                self.f.support_radius(),
                self.core_radius
            ));
        }
        if let Some((r, v)) = self.f.find_negative(0.0, self.f.end()) {
            return bad(format!("f is negative at r = {r} (value {v})"));
        }
        if self
            .f
            .sample_points(0.0, self.f.end())
            .iter()
            .all(|&r| self.f.eval(r) == 0.0)
        {
            return bad("f vanishes identically; its support must have nonempty interior".into());
        }
        if !self.g.covers(self.core_radius, self.rho_max) {
            return bad(format!(
                "g must be defined on [{}, {}]",
                self.core_radius, self.rho_max
            ));
        }
        if let Some((r, v)) = self.g.find_non_positive(self.core_radius, self.rho_max) {
            return bad(format!("g must be positive on [R, rho_max]; g({r}) = {v}"));
        }
        Ok(())
    }

    pub fn core(&self) -> BallGeometry {
        BallGeometry {
            dimension: self.dimension,
            radius: self.core_radius,
        }
    }

    pub fn ball(&self, rho: f64) -> BallGeometry {
        BallGeometry {
            dimension: self.dimension,
            radius: rho,
        }
    }

    pub fn with_g(&self, g: RadialProfile) -> Self {
        Self { g, ..self.clone() }
    }

    /// True when `g` decreases somewhere on `[R, rho_max]` (sampled).
    pub fn g_decreasing_somewhere(&self) -> bool {
        let pts = self.g.sample_points(self.core_radius, self.rho_max);
        pts.windows(2)
            .any(|w| self.g.eval(w[1]) < self.g.eval(w[0]) - 1e-14 * self.g.eval(w[0]).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn eval_constant_profile() {
        let f = RadialProfile::constant(1.0, 1.0).unwrap();
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
    }

    #[test]
    fn eval_torsion_at_origin() {
        let u = RadialProfile::polynomial(vec![1.0 / 6.0, 0.0, -1.0 / 6.0], 1.0).unwrap();
        assert!((u.eval(0.0) - 1.0 / 6.0).abs() < 1e-16);
    }

    #[test]
    fn extended_profile_continues_last_segment() {
        let g = RadialProfile::new(
            vec![
                Segment::new(0.0, 1.0, vec![1.0]),
                Segment::new(1.0, 2.0, vec![0.0, 1.0]),
            ],
            true,
        )
        .unwrap();
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.5), 1.5);
        assert_eq!(g.eval(7.0), 7.0);
        assert_eq!(g.support_radius(), f64::INFINITY);
    }

    #[test]
    fn rejects_gaps_and_bad_bounds() {
        let gap = RadialProfile::new(
            vec![
                Segment::new(0.0, 1.0, vec![1.0]),
                Segment::new(1.5, 2.0, vec![1.0]),
            ],
            false,
        );
        assert!(matches!(gap, Err(Error::InvalidProfile(_))));
        assert!(RadialProfile::constant(1.0, 0.0).is_err());
        assert!(RadialProfile::new(vec![], false).is_err());
    }

    #[test]
    fn laplacian_examples() {
        let r2 = RadialProfile::polynomial(vec![0.0, 0.0, 1.0], 1.0).unwrap();
        assert_eq!(r2.radial_laplacian(3).unwrap().eval(0.3), 6.0);

        let torsion = RadialProfile::polynomial(vec![1.0 / 6.0, 0.0, -1.0 / 6.0], 1.0).unwrap();
        assert!((torsion.radial_laplacian(3).unwrap().eval(0.4) + 1.0).abs() < 1e-15);

        let phi = RadialProfile::polynomial(vec![2.0, 0.0, -1.0], 1.0).unwrap();
        assert_eq!(phi.radial_laplacian(3).unwrap().eval(0.9), -6.0);
    }

    #[test]
    fn laplacian_rejects_linear_term_at_origin() {
        let p = RadialProfile::polynomial(vec![0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            p.radial_laplacian(3),
            Err(Error::NonSmoothAtKnot { .. })
        ));
        let q = RadialProfile::new(
            vec![
                Segment::new(0.0, 1.0, vec![1.0]),
                Segment::new(1.0, 2.0, vec![0.0, 1.0]),
            ],
            false,
        )
        .unwrap();
        assert!(matches!(
            q.radial_laplacian(3),
            Err(Error::NonPolynomial { .. })
        ));
    }

    #[test]
    fn sphere_constants() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        let ball = BallGeometry::new(3, 1.0).unwrap();
        assert!((ball.surface_area() - 4.0 * PI).abs() < 1e-14);
        assert!((ball.volume() - 4.18879).abs() < 5e-6);
        assert!((gamma_half_integer(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        let spec = ProblemSpec::unit_ball_constant(0.005);
        assert!(spec.validate().is_ok());

        let mut wide = spec.clone();
        wide.f = RadialProfile::constant(1.0, 2.0).unwrap();
        assert!(wide.validate().is_err());

        let mut zero = spec.clone();
        zero.f = RadialProfile::constant(0.0, 1.0).unwrap();
        assert!(zero.validate().is_err());

        let mut neg_g = spec.clone();
        neg_g.g = RadialProfile::polynomial_everywhere(vec![1.0, -0.5]);
        assert!(neg_g.validate().is_err());

        let mut low = spec;
        low.rho_max = 1.0;
        assert!(low.validate().is_err());
    }

    #[test]
    fn constant_detection() {
        let g = RadialProfile::constant_everywhere(0.3);
        assert_eq!(g.constant_from(1.0), Some(0.3));
        let lin = RadialProfile::polynomial_everywhere(vec![0.0, 1.0]);
        assert_eq!(lin.constant_from(1.0), None);
    }
}
