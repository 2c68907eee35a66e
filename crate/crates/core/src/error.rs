use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radial Laplacian is singular at r = 0 on segment [{lo}, {hi}] (linear term present)")]
    NonSmoothAtKnot { lo: f64, hi: f64 },

    #[error("radial Laplacian of a polynomial segment [{lo}, {hi}] is not polynomial (linear term present)")]
    NonPolynomial { lo: f64, hi: f64 },

    #[error("integrand is singular at r = 0 (exponent {exponent})")]
    SingularAtZero { exponent: i32 },

    #[error(
        "adaptive quadrature did not reach tolerance: estimate {estimate}, error bound {error}"
    )]
    ToleranceNotMet { estimate: f64, error: f64 },

    #[error(
        "log-power closure exceeded: iteration produced log^{log_power} terms (limit {limit})"
    )]
    LogClosureUnsupported { log_power: u32, limit: u32 },

    #[error("unsupported dimension N = {0}")]
    UnsupportedDimension(usize),

    #[error("alpha = {alpha} is below the eigenvalue bound 1/lambda_1 = {bound}")]
    AlphaTooSmall { alpha: f64, bound: f64 },

    #[error("Hardy constant c = {c} is below (p/(p-1))^p = {bound}")]
    CTooSmall { c: f64, bound: f64 },

    #[error("phi is not admissible at r = {r}: {reason}")]
    PhiNotSuperharmonic { r: f64, reason: String },

    #[error("input function is not positive at r = {r} (value {value})")]
    NonPositiveInput { r: f64, value: f64 },

    #[error("boundary data g is not constant on the core boundary and beyond")]
    NonConstantG,

    #[error("g is not defined on the ball interior [0, {rho}] (starts at {start})")]
    GInteriorUndefined { rho: f64, start: f64 },

    #[error("existence condition fails: {lhs} vs {rhs} (margin {margin}); {explanation}")]
    NoSolutionCertificate {
        lhs: f64,
        rhs: f64,
        margin: f64,
        explanation: String,
    },

    #[error(
        "no sign change of the deficit on ({lo}, {hi}]; value at rho_max is {value_at_rho_max}"
    )]
    BracketNotFound {
        lo: f64,
        hi: f64,
        value_at_rho_max: f64,
    },

    #[error("numerical verification failed: {0}")]
    Verification(String),
}
