//! Exact integration of piecewise power-log functions, with an adaptive
//! Gauss-Kronrod rule kept as an independent cross-check.
//!
//! A term is `c r^k ln(r)^j` with integer `k` (possibly negative) and
//! `j >= 0`. This family is closed under differentiation, antidifferentiation
//! and products, which is all the radial solvers need: polynomial sources in
//! `N >= 3` stay in Laurent polynomials, and `N = 2` brings in `ln r`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BallGeometry, RadialProfile};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerTerm {
    pub coefficient: f64,
    pub exponent: i32,
    #[serde(default)]
    pub log_power: u32,
}

impl PowerTerm {
    pub const fn new(coefficient: f64, exponent: i32) -> Self {
        Self {
            coefficient,
            exponent,
            log_power: 0,
        }
    }

    pub const fn with_log(coefficient: f64, exponent: i32, log_power: u32) -> Self {
        Self {
            coefficient,
            exponent,
            log_power,
        }
    }

    /// Value at `r`; at `r = 0` the limit is used where it exists.
    pub fn eval(&self, r: f64) -> f64 {
        if self.coefficient == 0.0 {
            return 0.0;
        }
        if r > 0.0 {
            let mut v = self.coefficient * r.powi(self.exponent);
            if self.log_power > 0 {
                v *= r.ln().powi(self.log_power as i32);
            }
            v
        } else if r == 0.0 {
            match (self.exponent, self.log_power) {
                (0, 0) => self.coefficient,
                (k, _) if k > 0 => 0.0,
                _ => f64::NAN,
            }
        } else {
            f64::NAN
        }
    }

    pub fn derivative(&self) -> Vec<PowerTerm> {
        let mut out = Vec::with_capacity(2);
        let k = self.exponent;
        if k != 0 {
            out.push(PowerTerm::with_log(
                self.coefficient * k as f64,
                k - 1,
                self.log_power,
            ));
        }
        if self.log_power > 0 {
            out.push(PowerTerm::with_log(
                self.coefficient * self.log_power as f64,
                k - 1,
                self.log_power - 1,
            ));
        }
        out
    }

    /// Antiderivative as a list of terms (no constant).
    ///
    /// `k = -1` integrates to `ln(r)^(j+1)/(j+1)`; otherwise repeated
    /// integration by parts gives
    /// `sum_i (-1)^i j!/(j-i)! r^(k+1) ln(r)^(j-i) / (k+1)^(i+1)`.
    pub fn antiderivative(&self) -> Vec<PowerTerm> {
        let j = self.log_power;
        if self.exponent == -1 {
            return vec![PowerTerm::with_log(
                self.coefficient / (j + 1) as f64,
                0,
                j + 1,
            )];
        }
        let kp1 = (self.exponent + 1) as f64;
        let mut out = Vec::with_capacity(j as usize + 1);
        let mut factor = self.coefficient / kp1;
        for i in 0..=j {
            out.push(PowerTerm::with_log(factor, self.exponent + 1, j - i));
            factor *= -((j - i) as f64) / kp1;
        }
        out
    }

    /// True when the antiderivative has no finite limit at `r = 0`.
    fn singular_antiderivative_at_zero(&self) -> bool {
        self.coefficient != 0.0 && self.exponent <= -1
    }
}

fn eval_terms(terms: &[PowerTerm], r: f64) -> f64 {
    terms.iter().map(|t| t.eval(r)).sum()
}

/// Merge like terms and drop exact zeros.
pub fn simplify_terms(mut terms: Vec<PowerTerm>) -> Vec<PowerTerm> {
    terms.sort_by_key(|t| (t.exponent, t.log_power));
    let mut out: Vec<PowerTerm> = Vec::with_capacity(terms.len());
    for t in terms {
        match out.last_mut() {
            Some(last) if last.exponent == t.exponent && last.log_power == t.log_power => {
                last.coefficient += t.coefficient;
            }
            _ => out.push(t),
        }
    }
    out.retain(|t| t.coefficient != 0.0);
    out
}

fn antiderivative_terms(terms: &[PowerTerm]) -> Vec<PowerTerm> {
    simplify_terms(terms.iter().flat_map(PowerTerm::antiderivative).collect())
}

fn multiply_terms(a: &[PowerTerm], b: &[PowerTerm]) -> Vec<PowerTerm> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(PowerTerm::with_log(
                x.coefficient * y.coefficient,
                x.exponent + y.exponent,
                x.log_power + y.log_power,
            ));
        }
    }
    simplify_terms(out)
}

/// Exact `int_a^b sum(terms) dr` for a single smooth piece.
pub fn integrate_exact(terms: &[PowerTerm], a: f64, b: f64) -> Result<f64> {
    if !(a <= b) || a < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "integration bounds must satisfy 0 <= a <= b, got [{a}, {b}]"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    if a == 0.0 {
        if let Some(t) = terms.iter().find(|t| t.singular_antiderivative_at_zero()) {
            return Err(Error::SingularAtZero {
                exponent: t.exponent,
            });
        }
    }
    let anti = antiderivative_terms(terms);
    Ok(eval_terms(&anti, b) - eval_terms(&anti, a))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub terms: Vec<PowerTerm>,
}

impl Piece {
    pub fn eval(&self, r: f64) -> f64 {
        eval_terms(&self.terms, r)
    }
}

/// Piecewise power-log function on a contiguous interval; zero outside.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePower {
    pieces: Vec<Piece>,
}

impl PiecewisePower {
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidProfile(
                "piecewise function without pieces".into(),
            ));
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return Err(Error::InvalidProfile(format!(
                    "pieces not contiguous at {} / {}",
                    w[0].hi, w[1].lo
                )));
            }
        }
        if pieces.iter().any(|p| !(p.lo < p.hi)) {
            return Err(Error::InvalidProfile("empty piece".into()));
        }
        Ok(Self { pieces })
    }

    fn from_pieces_unchecked(pieces: Vec<Piece>) -> Self {
        debug_assert!(!pieces.is_empty());
        Self { pieces }
    }

    pub fn constant(c: f64, lo: f64, hi: f64) -> Self {
        Self::from_pieces_unchecked(vec![Piece {
            lo,
            hi,
            terms: simplify_terms(vec![PowerTerm::new(c, 0)]),
        }])
    }

    pub fn zero(lo: f64, hi: f64) -> Self {
        Self::constant(0.0, lo, hi)
    }

    /// Restriction of a profile to `[0, hi]`, padded with zero where the
    /// profile is not defined.
    pub fn from_profile(profile: &RadialProfile, hi: f64) -> Self {
        let mut pieces = Vec::new();
        if profile.start() > 0.0 {
            pieces.push(Piece {
                lo: 0.0,
                hi: profile.start().min(hi),
                terms: Vec::new(),
            });
        }
        let segs = profile.segments();
        for (i, s) in segs.iter().enumerate() {
            if s.lo >= hi {
                break;
            }
            let last = i + 1 == segs.len();
            let top = if last && profile.extend_last() {
                hi
            } else {
                s.hi.min(hi)
            };
            let terms = simplify_terms(
                s.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| PowerTerm::new(c, k as i32))
                    .collect(),
            );
            pieces.push(Piece {
                lo: s.lo,
                hi: top,
                terms,
            });
        }
        let end = pieces.last().map_or(0.0, |p| p.hi);
        if end < hi {
            pieces.push(Piece {
                lo: end,
                hi,
                terms: Vec::new(),
            });
        }
        Self::from_pieces_unchecked(pieces)
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn lo(&self) -> f64 {
        self.pieces[0].lo
    }

    pub fn hi(&self) -> f64 {
        self.pieces[self.pieces.len() - 1].hi
    }

    /// All breakpoints, including both ends.
    pub fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.pieces.iter().map(|p| p.lo).collect();
        k.push(self.hi());
        k
    }

    fn piece_index(&self, r: f64) -> Option<usize> {
        if r < self.lo() || r > self.hi() {
            return None;
        }
        let idx = self.pieces.partition_point(|p| p.hi <= r);
        Some(idx.min(self.pieces.len() - 1))
    }

    fn terms_at(&self, r: f64) -> &[PowerTerm] {
        self.piece_index(r)
            .map_or(&[], |i| self.pieces[i].terms.as_slice())
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.piece_index(r).map_or(0.0, |i| self.pieces[i].eval(r))
    }

    pub fn max_log_power(&self) -> u32 {
        self.pieces
            .iter()
            .flat_map(|p| p.terms.iter())
            .map(|t| t.log_power)
            .max()
            .unwrap_or(0)
    }

    fn map_terms(&self, f: impl Fn(&[PowerTerm]) -> Vec<PowerTerm>) -> Self {
        Self::from_pieces_unchecked(
            self.pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    hi: p.hi,
                    terms: simplify_terms(f(&p.terms)),
                })
                .collect(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map_terms(|ts| {
            ts.iter()
                .map(|t| PowerTerm::with_log(t.coefficient * factor, t.exponent, t.log_power))
                .collect()
        })
    }

    /// Multiply by `r^k`.
    pub fn mul_power(&self, k: i32) -> Self {
        self.map_terms(|ts| {
            ts.iter()
                .map(|t| PowerTerm::with_log(t.coefficient, t.exponent + k, t.log_power))
                .collect()
        })
    }

    pub fn derivative(&self) -> Self {
        self.map_terms(|ts| ts.iter().flat_map(PowerTerm::derivative).collect())
    }

    /// `h'' + (N-1) h'/r` on each open piece.
    pub fn radial_laplacian(&self, dimension: usize) -> Self {
        let d1 = self.derivative();
        let d2 = d1.derivative();
        d2.add(&d1.mul_power(-1).scale(dimension as f64 - 1.0))
    }

    fn combine(
        &self,
        other: &Self,
        lo: f64,
        hi: f64,
        op: impl Fn(&[PowerTerm], &[PowerTerm]) -> Vec<PowerTerm>,
    ) -> Self {
        let mut knots: Vec<f64> = self
            .knots()
            .into_iter()
            .chain(other.knots())
            .filter(|&k| k > lo && k < hi)
            .collect();
        knots.push(lo);
        knots.push(hi);
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let pieces = knots
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                Piece {
                    lo: w[0],
                    hi: w[1],
                    terms: simplify_terms(op(self.terms_at(mid), other.terms_at(mid))),
                }
            })
            .collect();
        Self::from_pieces_unchecked(pieces)
    }

    /// Sum over the union of both domains.
    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo().min(other.lo());
        let hi = self.hi().max(other.hi());
        self.combine(other, lo, hi, |a, b| a.iter().chain(b).copied().collect())
    }

    /// Product over the intersection of both domains.
    pub fn mul(&self, other: &Self) -> Self {
        let lo = self.lo().max(other.lo());
        let hi = self.hi().min(other.hi());
        assert!(lo < hi, "product of functions with disjoint domains");
        self.combine(other, lo, hi, multiply_terms)
    }

    /// The function on `[lo, hi]`, zero where it was undefined.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        assert!(lo < hi, "empty restriction interval");
        self.combine(&Self::zero(lo, hi), lo, hi, |a, _| a.to_vec())
    }

    /// Exact `int_a^b h(r) dr`; the integrand is zero outside the domain.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64> {
        if !(a <= b) {
            return Err(Error::InvalidArgument(format!(
                "integration bounds reversed: [{a}, {b}]"
            )));
        }
        let mut total = 0.0;
        for p in &self.pieces {
            let lo = p.lo.max(a);
            let hi = p.hi.min(b);
            if lo < hi {
                total += integrate_exact(&p.terms, lo, hi)?;
            }
        }
        Ok(total)
    }

    /// `int_a^b r^(N-1) h(r) dr`.
    pub fn moment(&self, dimension: usize, a: f64, b: f64) -> Result<f64> {
        self.mul_power(dimension as i32 - 1).integrate(a, b)
    }

    /// `int_{B_rho} h dx` for the radial function `h`.
    pub fn volume_integral(&self, geometry: &BallGeometry) -> Result<f64> {
        Ok(geometry.omega() * self.moment(geometry.dimension, 0.0, geometry.radius)?)
    }
}

/// `int_{B_rho} h dx = omega_N int_0^rho h(r) r^(N-1) dr`, exact.
pub fn volume_integral(profile: &RadialProfile, geometry: &BallGeometry) -> Result<f64> {
    PiecewisePower::from_profile(profile, geometry.radius).volume_integral(geometry)
}

/// `int_{dB_rho} h = omega_N rho^(N-1) h(rho)`.
pub fn surface_integral(profile: &RadialProfile, geometry: &BallGeometry) -> f64 {
    surface_integral_of_value(profile.eval(geometry.radius), geometry)
}

/// Surface integral of a radial function whose value on the sphere is `value`.
pub fn surface_integral_of_value(value: f64, geometry: &BallGeometry) -> f64 {
    geometry.surface_area() * value
}

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 48;

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[i] * sum;
        if i % 2 == 1 {
            gauss += WG[i / 2] * sum;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

fn adaptive_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    acc: &mut (f64, f64, bool),
) {
    let (value, err) = gauss_kronrod(f, a, b);
    let noise = 50.0 * f64::EPSILON * value.abs();
    if err <= tol || err <= noise {
        acc.0 += value;
        acc.1 += err;
        return;
    }
    if depth >= MAX_DEPTH {
        acc.0 += value;
        acc.1 += err;
        acc.2 = false;
        return;
    }
    let mid = 0.5 * (a + b);
    adaptive_step(f, a, mid, 0.5 * tol, depth + 1, acc);
    adaptive_step(f, mid, b, 0.5 * tol, depth + 1, acc);
}

/// Adaptive Gauss-Kronrod (7, 15) quadrature with interval bisection.
///
/// The local error estimate is `|K15 - G7|`; the tolerance is split evenly
/// between the two halves of every bisected interval. The rule never samples
/// the endpoints, so removable singularities there are harmless.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut acc = (0.0, 0.0, true);
    adaptive_step(&f, lo, hi, tol, 0, &mut acc);
    if !acc.2 || !acc.0.is_finite() {
        return Err(Error::ToleranceNotMet {
            estimate: sign * acc.0,
            error: acc.1,
        });
    }
    Ok(sign * acc.0)
}
